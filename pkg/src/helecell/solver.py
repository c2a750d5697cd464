"""Time integration on the no-flux 1D grid.

Two integrators for dn/dt - d/dx(n dp/dx) = n G(p):

* ``step_explicit_upwind`` / scheme "explicit": monotone finite-volume
  upwind scheme, stable under the CFL bound of :func:`cfl_dt`.  Under
  that bound it preserves positivity, the singular-law density ceiling,
  and cellwise ordering of states (discrete comparison principle).
* ``step_semi_implicit`` / scheme "semi_implicit": treats the diffusive
  form dn/dt - d2/dx2 H(n) = n G(p) with implicit diffusion (Newton on
  a tridiagonal system) and explicit reaction.  Unconditionally stable
  in the diffusive part; the driver additionally caps dt by
  reaction_safety / (g * max D) so the explicit reaction cannot
  oscillate the state across the density ceiling.

``run`` drives either scheme snapshot-to-snapshot and collects
diagnostics; the explicit path runs in compiled kernels, the
semi-implicit path in numpy with banded LU solves.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from . import _kernels
from .diagnostics import DiagnosticsRecord, record
from .model import (
    GrowthLaw,
    Grid1D,
    PowerLaw,
    PressureLaw,
    RunConfig,
    SimState,
    SingularLaw,
    N_GUARD,
    density_ceiling,
    validate_config,
)

__all__ = [
    "SolverError",
    "CflViolation",
    "OverlapViolation",
    "NewtonDiverged",
    "StepReport",
    "Trajectory",
    "pressure_field",
    "cfl_dt",
    "step_explicit_upwind",
    "step_semi_implicit",
    "run",
    "run_with_source",
]

_MAX_STEPS_PER_WINDOW = 200_000_000
_NEWTON_RETRIES = 5


class SolverError(RuntimeError):
    """Base class for integration failures; carries the failing time."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t:.6g})")
        self.t = t


class CflViolation(SolverError):
    pass


class OverlapViolation(SolverError):
    pass


class NewtonDiverged(SolverError):
    pass


@dataclass(frozen=True)
class StepReport:
    dt_used: float
    newton_iterations: int
    max_flux: float
    post_step_extrema: tuple


@dataclass
class Trajectory:
    """Snapshots, their diagnostics, and the running dissipation integral.

    ``cum_grad_sq[k]`` is sum over all steps up to snapshot k of
    dt * h * sum_faces ((p_{i+1}-p_i)/h)^2, evaluated at each step's
    post-step state — the discrete version of the time-integrated
    squared pressure-gradient norm.
    """

    states: list = field(default_factory=list)
    records: list = field(default_factory=list)
    cum_grad_sq: list = field(default_factory=list)
    config: RunConfig | None = None

    @property
    def final_state(self) -> SimState:
        return self.states[-1]

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])


def pressure_field(state: SimState, law: PressureLaw) -> np.ndarray:
    return law.pressure(state.n)


def cfl_dt(
    state: SimState,
    grid: Grid1D,
    law: PressureLaw,
    growth: GrowthLaw | None,
    safety: float = 1.0,
) -> float:
    """Stable explicit step: safety * min(h^2/(2 max D), 1/G_m).

    May be +inf (vacuum state without growth); callers clip to the
    remaining time.
    """
    d = law.diffusivity(state.n)
    dmax = float(d.max()) if d.size else 0.0
    dt = math.inf
    if dmax > 0.0:
        dt = grid.h**2 / (2.0 * dmax)
    if growth is not None:
        dt = min(dt, 1.0 / growth.g_max)
    return safety * dt


def _growth_factor(p: np.ndarray, growth: GrowthLaw | None, dt: float) -> np.ndarray:
    if growth is None:
        return np.ones_like(p)
    return 1.0 + dt * growth.value(p)


def _explicit_update(n, h, dt, law, growth, source_vals=None):
    """One upwind step on a raw array; returns (n_new, max_flux)."""
    p = law.pressure(n)
    v = (p[:-1] - p[1:]) / h
    face = np.where(v >= 0.0, n[:-1], n[1:]) * v
    div = np.zeros_like(n)
    div[:-1] -= face
    div[1:] += face
    n_new = n + (dt / h) * div
    if growth is not None:
        n_new = n_new + dt * n * growth.value(p)
    if source_vals is not None:
        n_new = n_new + dt * source_vals
    max_flux = float(np.abs(face).max()) if face.size else 0.0
    return n_new, max_flux


def step_explicit_upwind(
    state: SimState,
    grid: Grid1D,
    dt: float,
    law: PressureLaw,
    growth: GrowthLaw | None = None,
) -> tuple:
    """One explicit step; raises CflViolation if dt exceeds the bound."""
    bound = cfl_dt(state, grid, law, growth, safety=1.0)
    if dt > bound * (1.0 + 1e-12):
        raise CflViolation(
            f"dt={dt:.6g} exceeds the stable bound {bound:.6g}", state.t
        )
    n_new, max_flux = _explicit_update(state.n, grid.h, dt, law, growth)
    if isinstance(law, SingularLaw) and (n_new.min() < 0.0 or n_new.max() >= 1.0):
        raise OverlapViolation(
            f"density left [0, 1): range [{n_new.min():.6g}, {n_new.max():.6g}]",
            state.t + dt,
        )
    new_state = SimState(state.t + dt, n_new)
    report = StepReport(dt, 0, max_flux, (float(n_new.min()), float(n_new.max())))
    return new_state, report


def _laplacian_noflux(v: np.ndarray, h: float) -> np.ndarray:
    lap = np.empty_like(v)
    lap[1:-1] = v[:-2] - 2.0 * v[1:-1] + v[2:]
    lap[0] = v[1] - v[0]
    lap[-1] = v[-2] - v[-1]
    lap /= h * h
    return lap


def _newton_diffusion(b, guess, dt, h, law, cap, tol, max_iter):
    """Solve u - dt * Lap_h H(u) = b; returns (u, iterations, residual)."""
    N = b.shape[0]
    u = np.clip(guess, 0.0, cap)
    w = dt / (h * h)
    m = np.full(N, 2.0)
    m[0] = 1.0
    m[-1] = 1.0
    ab = np.zeros((3, N))
    res = math.inf
    for it in range(max_iter):
        resid = u - dt * _laplacian_noflux(law.potential(u), h) - b
        res = float(np.abs(resid).max())
        if res <= tol:
            return u, it, res
        hp = law.diffusivity(u)
        ab[1] = 1.0 + w * m * hp
        ab[0, 1:] = -w * hp[1:]
        ab[2, :-1] = -w * hp[:-1]
        delta = solve_banded((1, 1), ab, resid)
        u = np.clip(u - delta, 0.0, cap)
    resid = u - dt * _laplacian_noflux(law.potential(u), h) - b
    res = float(np.abs(resid).max())
    return u, max_iter, res


def step_semi_implicit(
    state: SimState,
    grid: Grid1D,
    dt: float,
    law: PressureLaw,
    growth: GrowthLaw | None = None,
    newton_tol: float = 1e-12,
    newton_max_iter: int = 50,
    source_vals: np.ndarray | None = None,
) -> tuple:
    """One semi-implicit step: implicit diffusion, explicit reaction."""
    n = state.n
    p = law.pressure(n)
    b = n * _growth_factor(p, growth, dt)
    if source_vals is not None:
        b = b + dt * source_vals
    cap = density_ceiling(law, growth)
    if cap is None:
        cap = N_GUARD if isinstance(law, SingularLaw) else math.inf
    u, iters, res = _newton_diffusion(
        b, b, dt, grid.h, law, cap, newton_tol, newton_max_iter
    )
    if res > 10.0 * newton_tol:
        raise NewtonDiverged(
            f"Newton residual {res:.3g} after {iters} iterations (dt={dt:.3g})",
            state.t,
        )
    Hu = law.potential(u)
    max_flux = float(np.abs(np.diff(Hu)).max() / grid.h) if u.size > 1 else 0.0
    new_state = SimState(state.t + dt, u)
    report = StepReport(dt, iters, max_flux, (float(u.min()), float(u.max())))
    return new_state, report


def _grad_sq_sum(p: np.ndarray, h: float) -> float:
    dp = np.diff(p)
    return float(dp @ dp) / h


def _reaction_dt_cap(law, growth, n, reaction_safety):
    """Largest dt keeping the explicit reaction monotone near the ceiling."""
    if growth is None:
        return math.inf
    if isinstance(law, SingularLaw):
        pm = growth.p_homeostatic
        dmax = pm * (pm + law.epsilon) / law.epsilon
    else:
        nmax = float(n.max())
        if nmax <= 0.0:
            return math.inf
        dmax = float(law.diffusivity(np.array([nmax]))[0])
    if dmax <= 0.0:
        return math.inf
    return reaction_safety / (growth.g_slope * dmax)


def _snapshot_times(t_final: float, snapshot_dt: float) -> list:
    if t_final <= 0.0:
        return [0.0]
    k = int(math.floor(t_final / snapshot_dt + 1e-9))
    times = [i * snapshot_dt for i in range(k + 1)]
    if times[-1] < t_final - 1e-12 * max(1.0, t_final):
        times.append(t_final)
    else:
        times[-1] = t_final
    return times


def _advance_explicit_window(n, t, t_stop, grid, law, growth, safety):
    """Run the compiled kernel until t_stop; returns (t, cum_increment)."""
    g_slope = growth.g_slope if growth is not None else 0.0
    p_hom = growth.p_homeostatic if growth is not None else 0.0
    if isinstance(law, SingularLaw):
        t_new, steps, cum, status = _kernels.advance_explicit_singular(
            n, t, t_stop, grid.h, law.epsilon, g_slope, p_hom, safety,
            _MAX_STEPS_PER_WINDOW,
        )
    else:
        t_new, steps, cum, status = _kernels.advance_explicit_power(
            n, t, t_stop, grid.h, law.gamma, g_slope, p_hom, safety,
            _MAX_STEPS_PER_WINDOW,
        )
    if status == _kernels.STATUS_OVERLAP:
        raise OverlapViolation("density left [0, 1)", t_new)
    if status == _kernels.STATUS_MAX_STEPS:
        raise SolverError("step budget exhausted before reaching the snapshot", t_new)
    if status == _kernels.STATUS_RUNAWAY:
        raise SolverError("density magnitude ran away", t_new)
    if not np.all(np.isfinite(n)):
        raise SolverError("non-finite density after explicit window", t_new)
    return t_new, cum


def _advance_semi_implicit_window(
    n, t, t_stop, grid, law, growth, config, source=None, x=None
):
    """Python driver for the semi-implicit scheme; returns (n, t, cum_inc)."""
    cum = 0.0
    h = grid.h
    tiny = 1e-12 * max(1.0, t_stop)
    while t < t_stop - tiny:
        dt = min(config.dt, _reaction_dt_cap(law, growth, n, config.reaction_safety))
        dt = min(dt, t_stop - t)
        src = source(t, x) if source is not None else None
        state = SimState(t, n)
        attempt_dt = dt
        last_err = None
        for _ in range(_NEWTON_RETRIES + 1):
            try:
                new_state, rep = step_semi_implicit(
                    state, grid, attempt_dt, law, growth,
                    newton_tol=config.newton_tol,
                    newton_max_iter=config.newton_max_iter,
                    source_vals=src,
                )
                break
            except NewtonDiverged as err:
                last_err = err
                attempt_dt *= 0.5
        else:
            raise last_err
        n = np.array(new_state.n)
        t = new_state.t
        cum += attempt_dt * _grad_sq_sum(law.pressure(n), h)
    return n, t, cum


def _collect(config: RunConfig, advance, compact_support: bool = True):
    """Shared snapshot loop: advance(n, t, t_stop) -> (n, t, cum_inc)."""
    warns = validate_config(config, compact_support=compact_support)
    for w in warns:
        warnings.warn(w, stacklevel=3)
    grid, law, growth = config.grid, config.law, config.growth
    n = config.initial_density()
    t = 0.0
    cum = 0.0
    traj = Trajectory(config=config)
    state = SimState(0.0, n)
    traj.states.append(state)
    traj.cum_grad_sq.append(0.0)
    traj.records.append(record(state, grid, law, growth))
    prev = state
    for t_stop in _snapshot_times(config.t_final, config.snapshot_dt)[1:]:
        n, t, inc = advance(n, t, t_stop)
        if abs(t - t_stop) > 1e-9 * max(1.0, t_stop):
            raise SolverError("integration stalled before the snapshot time", t)
        t = t_stop  # snap off the last step's float rounding
        cum += inc
        state = SimState(t, n)
        traj.states.append(state)
        traj.cum_grad_sq.append(cum)
        traj.records.append(record(state, grid, law, growth, prev_state=prev))
        prev = state
    return traj


def run(config: RunConfig) -> Trajectory:
    """Integrate the configured problem, recording snapshot diagnostics."""
    grid, law, growth = config.grid, config.law, config.growth

    if config.scheme == "explicit":

        def advance(n, t, t_stop):
            n = np.array(n, dtype=np.float64)
            t_new, inc = _advance_explicit_window(
                n, t, t_stop, grid, law, growth, config.cfl_safety
            )
            return n, t_new, inc

    else:

        def advance(n, t, t_stop):
            n = np.array(n, dtype=np.float64)
            return _advance_semi_implicit_window(
                n, t, t_stop, grid, law, growth, config
            )

    return _collect(config, advance)


def run_with_source(config: RunConfig, source) -> Trajectory:
    """Like run, with +dt*source(t, x) added each step (for manufactured
    solutions); the source is evaluated at the pre-step time."""
    grid, law, growth = config.grid, config.law, config.growth
    x = grid.centers()

    if config.scheme == "explicit":

        def advance(n, t, t_stop):
            n = np.array(n, dtype=np.float64)
            cum = 0.0
            tiny = 1e-12 * max(1.0, t_stop)
            while t < t_stop - tiny:
                state = SimState(t, n)
                dt = cfl_dt(state, grid, law, growth, config.cfl_safety)
                dt = min(dt, t_stop - t)
                n, _ = _explicit_update(
                    n, grid.h, dt, law, growth, source_vals=source(t, x)
                )
                if isinstance(law, SingularLaw) and (
                    n.min() < 0.0 or n.max() >= 1.0
                ):
                    raise OverlapViolation("density left [0, 1)", t + dt)
                t += dt
                cum += dt * _grad_sq_sum(law.pressure(n), grid.h)
            return n, t, cum

    else:

        def advance(n, t, t_stop):
            n = np.array(n, dtype=np.float64)
            return _advance_semi_implicit_window(
                n, t, t_stop, grid, law, growth, config, source=source, x=x
            )

    return _collect(config, advance, compact_support=False)
