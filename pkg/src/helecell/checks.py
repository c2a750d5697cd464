"""Self-contained property suites for the `check` CLI subcommand.

Each suite re-verifies a family of invariants at runtime (hand-computed
oracles, algebraic identities, scheme properties) and reports one
(name, passed, detail) triple per check.  The test suite asserts the
same facts; these exist so a deployed install can be interrogated
without pytest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .diagnostics import (
    BarrierSpec,
    SpecInvalid,
    barrier_check,
    complementary_residual,
    complementary_residual_weak,
    entropy_budget,
    record,
)
from .experiments import comparison_harness
from .model import (
    GrowthLaw,
    Grid1D,
    PlateauProfile,
    PowerLaw,
    RunConfig,
    SimState,
    SingularLaw,
    density_ceiling,
)
from .solver import (
    Trajectory,
    cfl_dt,
    run,
    step_explicit_upwind,
    step_semi_implicit,
)

__all__ = ["CheckResult", "SUITES", "run_suite"]


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


def _result(suite, name, passed, detail=""):
    return CheckResult(suite, name, bool(passed), detail)


# ------------------------------------------------------------------ laws


def _laws_suite(seed: int) -> list:
    out = []
    ladder = np.linspace(0.0, 0.99, 1000)
    for eps in (0.5, 0.1, 0.004):
        law = SingularLaw(eps)
        n = ladder
        err = float(np.abs(law.density(law.pressure(n)) - n).max())
        out.append(
            _result("laws", f"round_trip_singular_eps={eps}", err <= 1e-13,
                    f"max |N(P(n))-n| = {err:.3g}")
        )
        ncap = np.linspace(0.0, 10.0 / (10.0 + eps), 1000)
        gap = float(np.abs((1.0 - ncap) * law.pressure(ncap) - eps * ncap).max())
        out.append(
            _result("laws", f"state_law_identity_eps={eps}", gap <= 1e-13,
                    f"max |(1-n)p - eps n| = {gap:.3g}")
        )
    plaw = PowerLaw(20.0)
    n = np.linspace(0.0, 1.2, 1000)
    err = float(np.abs(plaw.density(plaw.pressure(n)) - n).max())
    out.append(
        _result("laws", "round_trip_power_gamma=20", err <= 1e-13,
                f"max |N(P(n))-n| = {err:.3g}")
    )
    for name, law, hi in (
        ("singular", SingularLaw(0.5), 0.99),
        ("power", PowerLaw(20.0), 1.2),
    ):
        n = np.linspace(1e-6, hi, 1000)
        mono_p = bool(np.all(np.diff(law.pressure(n)) > 0.0))
        mono_h = bool(np.all(np.diff(law.potential(n)) > 0.0))
        out.append(_result("laws", f"strictly_increasing_{name}", mono_p and mono_h))
        dn = 1e-7
        mid = n[(n > 0.01) & (n < hi - 0.01)]
        fd = (law.potential(mid + dn) - law.potential(mid - dn)) / (2 * dn)
        rel = float(np.abs(fd / law.diffusivity(mid) - 1.0).max())
        out.append(
            _result("laws", f"diffusivity_matches_potential_{name}", rel <= 1e-6,
                    f"max rel FD error = {rel:.3g}")
        )
    growth = GrowthLaw(10.0, 10.0)
    p = np.linspace(0.0, 20.0, 500)
    g = growth.value(p)
    ok = bool(np.all(g >= 0.0) and np.all(g <= growth.g_max))
    dec = bool(np.all(np.diff(growth.value(np.linspace(0.0, 10.0, 500))) < 0.0))
    out.append(_result("laws", "growth_bounds_and_decrease", ok and dec))
    # frozen hand-checked values
    law = SingularLaw(0.5)
    vals = [
        abs(float(law.pressure(0.5)) - 0.5) <= 1e-15,
        abs(float(law.pressure(10.0 / 10.5)) - 10.0) <= 1e-12,
        abs(float(law.diffusivity(10.0 / 10.5)) - 210.0) <= 1e-10,
        abs(float(law.potential(0.5)) - (0.5 + 0.5 * math.log(0.5))) <= 1e-14,
    ]
    out.append(_result("laws", "frozen_values", all(vals)))
    return out


# ---------------------------------------------------------------- solver


def _three_cell_oracle() -> CheckResult:
    grid = Grid1D(0.0, 3.0, 3)
    law = SingularLaw(1.0)
    state = SimState(0.0, np.array([0.0, 0.5, 0.0]))
    new, _ = step_explicit_upwind(state, grid, 0.1, law, None)
    expected = np.array([0.05, 0.4, 0.05])
    err = float(np.abs(new.n - expected).max())
    return _result("solver", "three_cell_upwind_oracle", err <= 1e-15,
                   f"got {new.n.tolist()}")


def _solver_suite(seed: int) -> list:
    out = [_three_cell_oracle()]
    law = SingularLaw(0.5)
    growth = GrowthLaw(10.0, 10.0)
    cap = density_ceiling(law, growth)
    grid = Grid1D(0.0, 0.05, 5)  # h = 0.01
    state = SimState(0.0, np.full(5, cap))
    got = cfl_dt(state, grid, law, growth, safety=1.0)
    expected = min(0.0001 / 420.0, 0.01)
    out.append(
        _result("solver", "cfl_ceiling_plateau_oracle",
                abs(got - expected) <= 1e-12 * expected,
                f"got {got!r}, expected {expected!r}")
    )
    big = Grid1D(-4.0, 4.0, 200)
    zero = SimState(0.0, np.zeros(200))
    a, _ = step_explicit_upwind(zero, big, 1e-3, law, growth)
    b, _ = step_semi_implicit(zero, big, 1e-3, law, growth)
    out.append(
        _result("solver", "vacuum_fixed_point",
                not a.n.any() and not b.n.any())
    )
    const = SimState(0.0, np.full(200, 0.5))
    dt = 1e-4
    expected_c = 0.5 * (1.0 + dt * 10.0 * (10.0 - 0.5))
    a, _ = step_explicit_upwind(const, big, dt, law, growth)
    b, _ = step_semi_implicit(const, big, dt, law, growth)
    ok = float(np.abs(a.n - expected_c).max()) <= 1e-15 and float(
        np.abs(b.n - expected_c).max()
    ) <= 1e-12
    out.append(_result("solver", "constant_state_pure_reaction", ok))
    # per-step diffusive mass conservation of the implicit solve
    profile = PlateauProfile()
    fine = Grid1D(-4.0, 4.0, 1600)
    n0 = profile.sample(fine)
    s0 = SimState(0.0, n0)
    s1, rep = step_semi_implicit(s0, fine, 1e-4, law, None)
    drift = abs(float(np.sum(s1.n) - np.sum(s0.n))) * fine.h
    out.append(
        _result("solver", "semi_implicit_mass_per_step", drift <= 1e-11,
                f"mass drift {drift:.3g} in {rep.newton_iterations} iterations")
    )
    # the two schemes agree on a tiny diffusive step; their spatial
    # discretizations differ (upwind flux vs. potential Laplacian), so
    # the one-step gap is O(dt * h), bounded here relative to dt
    dt_small = cfl_dt(s0, fine, law, None, safety=0.1)
    e1, _ = step_explicit_upwind(s0, fine, dt_small, law, None)
    i1, _ = step_semi_implicit(s0, fine, dt_small, law, None)
    l1 = float(fine.h * np.sum(np.abs(e1.n - i1.n)))
    out.append(
        _result("solver", "cross_scheme_small_step", l1 <= 50.0 * dt_small,
                f"L1 gap {l1:.3g} at dt={dt_small:.3g}")
    )
    return out


# ----------------------------------------------------------- diagnostics


def _diagnostics_suite(seed: int) -> list:
    out = []
    law = SingularLaw(0.5)
    growth = GrowthLaw(10.0, 10.0)
    grid = Grid1D(-4.0, 4.0, 400)
    vac = record(SimState(0.0, np.zeros(400)), grid, law, growth)
    ok = (
        vac.mass == 0.0
        and vac.support_radius == 0.0
        and vac.compl_residual_l1 == 0.0
        and vac.bv_seminorm == 0.0
        and vac.entropy == 0.0
    )
    out.append(_result("diagnostics", "vacuum_record_zeros", ok))
    cap = density_ceiling(law, growth)
    x = grid.centers()
    n = np.where(np.abs(x) <= 1.0, cap, 0.0)
    rec = record(SimState(0.0, n), grid, law, growth)
    ok = abs(rec.max_p - 10.0) <= 1e-10 and abs(rec.support_radius - 1.0) <= grid.h
    out.append(
        _result("diagnostics", "ceiling_plateau_record", ok,
                f"max_p={rec.max_p!r}, radius={rec.support_radius!r}")
    )
    # residual vanishes on the flat saturated interior (cells 151..248;
    # lap[j] belongs to cell j+1, and the plateau occupies cells 150..249)
    inner = slice(150, 248)
    p = law.pressure(n)
    lap = p[2:] - 2 * p[1:-1] + p[:-2]
    flat = np.abs(lap[inner]) < 1e-12
    out.append(_result("diagnostics", "residual_zero_on_plateau", bool(flat.all())))
    # a trajectory teleporting to full saturation must fail the barrier
    cfg = RunConfig(grid=grid, t_final=0.01)
    plateau = cfg.initial_density()
    fake = Trajectory(
        states=[SimState(0.0, plateau), SimState(0.01, np.full(400, cap))],
        records=[],
        cum_grad_sq=[0.0, 0.0],
        config=cfg,
    )
    spec = BarrierSpec(C=10.0, theta=1.0 / 400.0)
    rep = barrier_check(fake, law, spec)
    out.append(
        _result("diagnostics", "barrier_rejects_teleport", not rep.passed,
                f"pointwise excess {rep.max_pointwise_excess:.3g}")
    )
    try:
        BarrierSpec(C=-1.0, theta=0.1)
        out.append(_result("diagnostics", "barrier_spec_guard", False))
    except SpecInvalid:
        out.append(_result("diagnostics", "barrier_spec_guard", True))
    # entropy budget on a short default run
    short = RunConfig(t_final=0.02, snapshot_dt=0.005)
    traj = run(short)
    erep = entropy_budget(traj, short.law, short.growth)
    out.append(
        _result("diagnostics", "entropy_budget_short_run", erep.passed,
                f"max excess {erep.max_excess:.3g}")
    )
    # weak and strong complementary residuals both fall as the law stiffens
    vals = {}
    for eps in (0.5, 0.02):
        cfg = replace(short, law=SingularLaw(eps))
        t = run(cfg)
        s = t.final_state
        vals[eps] = (
            complementary_residual(s, cfg.grid, cfg.law, cfg.growth),
            complementary_residual_weak(s, cfg.grid, cfg.law, cfg.growth),
        )
    ok = vals[0.02][0] < vals[0.5][0] and vals[0.02][1] < vals[0.5][1]
    out.append(
        _result("diagnostics", "residuals_fall_with_stiffness", ok,
                f"strong {vals[0.5][0]:.3g}->{vals[0.02][0]:.3g}, "
                f"weak {vals[0.5][1]:.3g}->{vals[0.02][1]:.3g}")
    )
    return out


# ------------------------------------------------------------ comparison


def _comparison_suite(seed: int) -> list:
    out = []
    rep = comparison_harness(num_pairs=20, seed=seed)
    out.append(
        _result("comparison", "twenty_seeded_pairs", rep.passed,
                f"worst cellwise gap {rep.worst_gap:.3g}")
    )
    rep2 = comparison_harness(num_pairs=3, seed=seed)
    rep3 = comparison_harness(num_pairs=3, seed=seed)
    same = [o.worst_gap for o in rep2.outcomes] == [o.worst_gap for o in rep3.outcomes]
    out.append(_result("comparison", "seed_determinism", same))
    return out


SUITES = {
    "laws": _laws_suite,
    "solver": _solver_suite,
    "diagnostics": _diagnostics_suite,
    "comparison": _comparison_suite,
}


def run_suite(selector: str, seed: int = 42) -> list:
    """Run one suite (or 'all'); returns a list of CheckResult."""
    if selector == "all":
        names = list(SUITES)
    elif selector in SUITES:
        names = [selector]
    else:
        raise ValueError(
            f"unknown suite {selector!r}; choose from {', '.join(SUITES)} or 'all'"
        )
    results = []
    for name in names:
        results.extend(SUITES[name](seed))
    return results
