"""Measurable, assertable quantities on discrete states.

Each function here turns one of the model's a-priori estimates into a
number a test can check:

* ``record`` aggregates the per-snapshot measurements (mass, extrema,
  BV seminorm, support radius, residuals, entropy, the time-regularity
  monitor) into a ``DiagnosticsRecord``.
* ``complementary_residual`` measures how far a state is from the
  stiff-limit relation p^2 (Lap p + G(p)) = 0; it should shrink as the
  pressure law stiffens.
* ``barrier_check`` verifies finite propagation speed against an
  explicit moving-in-time supersolution (flat top of height C glued to
  a spreading parabola), iterated over windows of length theta.
* ``entropy_budget`` checks the integrated entropy inequality
  dE/dt + int |grad p|^2 <= G_m int n |psi(n)|.
* ``ab_monitor`` is the discrete shadow of the regularizing bound
  t * dp/dt >= -kappa * p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import Grid1D, GrowthLaw, PressureLaw, SimState, SingularLaw

__all__ = [
    "DiagnosticsRecord",
    "BarrierSpec",
    "BarrierReport",
    "EntropyReport",
    "SpecInvalid",
    "record",
    "complementary_residual",
    "complementary_residual_weak",
    "support_radius",
    "ab_monitor",
    "barrier_check",
    "entropy_density",
    "entropy_flux_density",
    "entropy_total",
    "entropy_budget",
]

SUPPORT_THRESHOLD = 1e-10
AB_PRESSURE_FLOOR = 1e-8
BARRIER_TOL = 1e-8


class SpecInvalid(ValueError):
    """A check specification does not dominate the data it must bound."""


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-snapshot measurements; ab_min_ratio is None on the first one."""

    t: float
    mass: float
    max_n: float
    max_p: float
    support_radius: float
    bv_seminorm: float
    compl_residual_l1: float
    state_law_gap: float
    grad_p_l2_sq: float
    entropy: float
    ab_min_ratio: float | None = None


def support_radius(p: np.ndarray, grid: Grid1D, threshold: float = SUPPORT_THRESHOLD):
    """Largest |x_i| whose cell has p_i > threshold, or 0.0."""
    x = grid.centers()
    occupied = np.abs(x[p > threshold])
    return float(occupied.max()) if occupied.size else 0.0


def complementary_residual(
    state: SimState, grid: Grid1D, law: PressureLaw, growth: GrowthLaw | None
) -> float:
    """Discrete L1 norm of p^2 (Lap_h p + G(p)) over interior cells."""
    p = law.pressure(state.n)
    h = grid.h
    lap = (p[2:] - 2.0 * p[1:-1] + p[:-2]) / (h * h)
    g = growth.value(p[1:-1]) if growth is not None else 0.0
    return float(h * np.sum(np.abs(p[1:-1] ** 2 * (lap + g))))


def _bump(x: np.ndarray, radius: float, width: float):
    """C^1 cutoff: 1 on |x| <= radius-width, 0 on |x| >= radius."""
    u = np.clip((radius - np.abs(x)) / width, 0.0, 1.0)
    phi = u * u * (3.0 - 2.0 * u)
    dphi = np.where((u > 0.0) & (u < 1.0), 6.0 * u * (1.0 - u), 0.0)
    dphi = dphi * (-np.sign(x) / width)
    return phi, dphi


def complementary_residual_weak(
    state: SimState,
    grid: Grid1D,
    law: PressureLaw,
    growth: GrowthLaw | None,
    radius: float = 3.0,
    width: float = 1.0,
) -> float:
    """Weak-form cross-check of the complementary relation.

    Evaluates |h * sum(-2 phi p |grad p|^2 - p^2 grad p . grad phi
    + phi p^2 G(p))| against a fixed smooth bump test function phi.
    """
    p = law.pressure(state.n)
    x = grid.centers()
    phi, dphi = _bump(x, radius, width)
    gp = np.gradient(p, grid.h)
    g = growth.value(p) if growth is not None else 0.0
    integrand = -2.0 * phi * p * gp**2 - p**2 * gp * dphi + phi * p**2 * g
    return float(abs(grid.h * np.sum(integrand)))


def ab_monitor(prev: SimState, nxt: SimState, law: PressureLaw, dt: float) -> float:
    """min over cells with p > floor of t * (dp/dt) / p at the later state.

    A lower bound -kappa uniform in the law's stiffness is the discrete
    shadow of the regularizing estimate dp/dt >= -kappa p / t.  Returns
    +inf when no cell clears the pressure floor.
    """
    p_prev = law.pressure(prev.n)
    p_next = law.pressure(nxt.n)
    mask = p_next > AB_PRESSURE_FLOOR
    if not np.any(mask):
        return math.inf
    ratio = nxt.t * (p_next[mask] - p_prev[mask]) / (dt * p_next[mask])
    return float(ratio.min())


def _entropy_guard(law: PressureLaw):
    if not isinstance(law, SingularLaw):
        raise ValueError("the entropy machinery is defined for the singular law only")


def entropy_density(n: np.ndarray, law: SingularLaw) -> np.ndarray:
    """Psi(n) = eps * n * (ln n - ln(1-n)), extended by 0 at n = 0."""
    _entropy_guard(law)
    out = np.zeros_like(n)
    mask = n > 0.0
    nm = n[mask]
    out[mask] = law.epsilon * nm * (np.log(nm) - np.log1p(-nm))
    return out


def entropy_flux_density(n: np.ndarray, law: SingularLaw) -> np.ndarray:
    """psi(n) = eps * (ln n - ln(1-n) + 1/(1-n)); -inf at n = 0."""
    _entropy_guard(law)
    with np.errstate(divide="ignore"):
        return law.epsilon * (np.log(n) - np.log1p(-n) + 1.0 / (1.0 - n))


def entropy_total(state: SimState, grid: Grid1D, law: SingularLaw) -> float:
    return float(grid.h * np.sum(entropy_density(state.n, law)))


def record(
    state: SimState,
    grid: Grid1D,
    law: PressureLaw,
    growth: GrowthLaw | None,
    prev_state: SimState | None = None,
) -> DiagnosticsRecord:
    """Aggregate all per-snapshot diagnostics for one state."""
    n = state.n
    p = law.pressure(n)
    h = grid.h
    dp = np.diff(p)
    if isinstance(law, SingularLaw):
        gap = float(np.abs((1.0 - n) * p - law.epsilon * n).max())
        entropy = float(h * np.sum(entropy_density(n, law)))
    else:
        gap = 0.0
        entropy = math.nan
    ab = None
    if prev_state is not None:
        ab = ab_monitor(prev_state, state, law, state.t - prev_state.t)
    return DiagnosticsRecord(
        t=state.t,
        mass=float(h * np.sum(n)),
        max_n=float(n.max()),
        max_p=float(p.max()),
        support_radius=support_radius(p, grid),
        bv_seminorm=float(np.sum(np.abs(np.diff(n)))),
        compl_residual_l1=complementary_residual(state, grid, law, growth),
        state_law_gap=gap,
        grad_p_l2_sq=float(dp @ dp) / h,
        entropy=entropy,
        ab_min_ratio=ab,
    )


@dataclass(frozen=True)
class BarrierSpec:
    """Iterated flat-top barrier: amplitude C, window length theta.

    Within each window [k*theta, (k+1)*theta] the barrier equals C out
    to the running support bound R_k and decays as the parabola
    C - (|x|-R_k)^2 / (4*(theta+tau)) beyond it (tau = time into the
    window); R_k advances by 2*sqrt(2*C*theta) per window.  For the
    growth-capped model C must be at least the homeostatic pressure so
    the flat top is stationary; the constructor does not know the
    growth law, so that is re-checked by barrier_check's caller.
    """

    C: float
    theta: float

    def __post_init__(self):
        if not (self.C > 0.0 and self.theta > 0.0):
            raise SpecInvalid("barrier needs C > 0 and theta > 0")

    def window(self, t: float) -> tuple:
        """(k, tau) with t = k*theta + tau, tau in (0, theta] for t > 0."""
        if t <= 0.0:
            return 0, 0.0
        k = max(0, math.ceil(t / self.theta - 1e-12) - 1)
        return k, t - k * self.theta

    def flat_radius(self, r0: float, k: int) -> float:
        return r0 + k * 2.0 * math.sqrt(2.0 * self.C * self.theta)

    def radius_bound(self, r0: float, t: float) -> float:
        k, tau = self.window(t)
        return self.flat_radius(r0, k) + 2.0 * math.sqrt(self.C * (self.theta + tau))

    def profile(self, x: np.ndarray, r0: float, t: float) -> np.ndarray:
        k, tau = self.window(t)
        rk = self.flat_radius(r0, k)
        d = np.maximum(np.abs(x) - rk, 0.0)
        return np.maximum(self.C - d * d / (4.0 * (self.theta + tau)), 0.0)


@dataclass(frozen=True)
class BarrierReport:
    passed: bool
    max_pointwise_excess: float
    max_radius_excess: float
    times: list = field(default_factory=list)
    radii: list = field(default_factory=list)
    radius_bounds: list = field(default_factory=list)


def barrier_check(
    trajectory, law: PressureLaw, spec: BarrierSpec, tol: float = BARRIER_TOL
) -> BarrierReport:
    """Verify every snapshot's pressure sits under the iterated barrier.

    The barrier is seeded with the first snapshot's support radius and
    only then advances by its own recurrence — no later measurement
    feeds back into it, so a too-fast trajectory genuinely fails.
    Raises SpecInvalid if C does not dominate the initial pressure.
    """
    grid = trajectory.config.grid
    x = grid.centers()
    p0 = law.pressure(trajectory.states[0].n)
    if spec.C < float(p0.max()):
        raise SpecInvalid(
            f"barrier amplitude {spec.C:.6g} below initial max pressure "
            f"{float(p0.max()):.6g}"
        )
    r0 = support_radius(p0, grid)
    worst_point = -math.inf
    worst_radius = -math.inf
    times, radii, bounds = [], [], []
    for state in trajectory.states:
        p = law.pressure(state.n)
        barrier = spec.profile(x, r0, state.t)
        worst_point = max(worst_point, float((p - barrier).max()))
        r = support_radius(p, grid)
        bound = spec.radius_bound(r0, state.t)
        worst_radius = max(worst_radius, r - bound)
        times.append(state.t)
        radii.append(r)
        bounds.append(bound)
    passed = worst_point <= tol and worst_radius <= tol
    return BarrierReport(passed, worst_point, worst_radius, times, radii, bounds)


@dataclass(frozen=True)
class EntropyReport:
    """Integrated entropy budget E(t) - E(0) + D(t) <= slack*RHS(t) + tol."""

    passed: bool
    max_excess: float
    times: list
    entropy: list
    dissipation: list
    rhs_cumulative: list


def entropy_budget(
    trajectory,
    law: SingularLaw,
    growth: GrowthLaw | None,
    slack: float = 1.05,
    tol: float = 1e-8,
) -> EntropyReport:
    """Check the entropy inequality along a trajectory.

    Uses the solver's exact per-step dissipation accumulation
    (trajectory.cum_grad_sq); the production term G_m * h * sum n|psi(n)|
    is integrated by the trapezoid rule over snapshots.  With growth
    disabled the right-hand side vanishes and the check is exact up to
    tol.
    """
    _entropy_guard(law)
    grid = trajectory.config.grid
    h = grid.h
    times = [s.t for s in trajectory.states]
    entropy = [entropy_total(s, grid, law) for s in trajectory.states]
    diss = list(trajectory.cum_grad_sq)
    if growth is None:
        rhs_rate = [0.0 for _ in trajectory.states]
    else:
        rhs_rate = []
        for s in trajectory.states:
            n = s.n
            mask = n > 0.0
            nm = n[mask]
            psi = law.epsilon * (np.log(nm) - np.log1p(-nm) + 1.0 / (1.0 - nm))
            rhs_rate.append(growth.g_max * h * float(np.sum(nm * np.abs(psi))))
    rhs_cum = [0.0]
    for k in range(1, len(times)):
        dt = times[k] - times[k - 1]
        rhs_cum.append(rhs_cum[-1] + 0.5 * dt * (rhs_rate[k] + rhs_rate[k - 1]))
    excess = [
        entropy[k] - entropy[0] + diss[k] - slack * rhs_cum[k]
        for k in range(len(times))
    ]
    max_excess = max(excess)
    return EntropyReport(max_excess <= tol, max_excess, times, entropy, diss, rhs_cum)
