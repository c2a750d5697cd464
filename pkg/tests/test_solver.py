"""Stepping kernels: hand oracles, conservation, stability guards."""

import math
from dataclasses import replace

import numpy as np
import pytest

from helecell import (
    CflViolation,
    Grid1D,
    GrowthLaw,
    RunConfig,
    SimState,
    SingularLaw,
    cfl_dt,
    run,
    step_explicit_upwind,
    step_semi_implicit,
)


def _mass(grid, n):
    return grid.h * float(np.sum(n))


class TestCflDt:
    def test_formula(self):
        # plateau at the ceiling: D = 210, h = 0.01
        grid = Grid1D(0.0, 0.05, 5)
        law = SingularLaw(0.5)
        growth = GrowthLaw(10.0, 10.0)
        n = np.full(5, 10.0 / 10.5)
        dt = cfl_dt(SimState(0.0, n), grid, law, growth)
        assert dt == pytest.approx(min(0.01**2 / (2.0 * 210.0), 0.01), rel=1e-12)

    def test_vacuum_without_growth_is_unbounded(self):
        grid = Grid1D(0.0, 1.0, 10)
        dt = cfl_dt(SimState(0.0, np.zeros(10)), grid, SingularLaw(0.5), None)
        assert math.isinf(dt)

    def test_safety_scales(self):
        grid = Grid1D(0.0, 1.0, 10)
        law = SingularLaw(0.5)
        st = SimState(0.0, np.full(10, 0.5))
        assert cfl_dt(st, grid, law, None, 0.5) == pytest.approx(
            0.5 * cfl_dt(st, grid, law, None, 1.0)
        )


class TestExplicitStep:
    def test_three_cell_oracle(self):
        # unit-eps law, n = [0, 1/2, 0]: p = [0, 1, 0], faces carry
        # dt/h * v * n_upwind = 0.1/1 * 1 * 0.5 = 0.05 to each neighbour
        grid = Grid1D(0.0, 3.0, 3)
        law = SingularLaw(1.0)
        st = SimState(0.0, np.array([0.0, 0.5, 0.0]))
        new, rep = step_explicit_upwind(st, grid, 0.1, law, None)
        assert np.max(np.abs(new.n - [0.05, 0.4, 0.05])) < 1e-15
        assert rep.dt_used == 0.1

    def test_mass_conserved_without_growth(self):
        grid = Grid1D(-1.0, 1.0, 100)
        law = SingularLaw(0.5)
        rng = np.random.default_rng(0)
        n = 0.5 * rng.random(100)
        st = SimState(0.0, n)
        dt = cfl_dt(st, grid, law, None, 0.9)
        new, _ = step_explicit_upwind(st, grid, dt, law, None)
        assert _mass(grid, new.n) == pytest.approx(_mass(grid, n), abs=1e-14)

    def test_oversized_dt_rejected(self):
        grid = Grid1D(-1.0, 1.0, 100)
        law = SingularLaw(0.5)
        st = SimState(0.0, np.full(100, 0.5))
        bound = cfl_dt(st, grid, law, None, 1.0)
        with pytest.raises(CflViolation):
            step_explicit_upwind(st, grid, 2.0 * bound, law, None)

    def test_vacuum_fixed_point(self):
        grid = Grid1D(-1.0, 1.0, 50)
        law = SingularLaw(0.5)
        st = SimState(0.0, np.zeros(50))
        new, _ = step_explicit_upwind(st, grid, 0.01, law, GrowthLaw(10.0, 10.0))
        assert np.all(new.n == 0.0)

    def test_constant_state_pure_reaction(self):
        # uniform density: no flux, only n <- n (1 + dt G(p))
        grid = Grid1D(-1.0, 1.0, 50)
        law = SingularLaw(0.5)
        growth = GrowthLaw(10.0, 10.0)
        st = SimState(0.0, np.full(50, 0.5))
        dt = 1e-4
        new, _ = step_explicit_upwind(st, grid, dt, law, growth)
        p = law.pressure(0.5)
        expected = 0.5 * (1.0 + dt * 10.0 * (10.0 - p))
        assert np.max(np.abs(new.n - expected)) < 1e-15


class TestSemiImplicitStep:
    def test_vacuum_fixed_point(self):
        grid = Grid1D(-1.0, 1.0, 50)
        law = SingularLaw(0.5)
        st = SimState(0.0, np.zeros(50))
        new, _ = step_semi_implicit(st, grid, 0.01, law, GrowthLaw(10.0, 10.0))
        assert np.all(new.n == 0.0)

    def test_mass_identity_with_growth(self):
        # implicit diffusion conserves mass exactly, so the update mass
        # equals the mass of the reaction predictor b
        grid = Grid1D(-1.0, 1.0, 200)
        law = SingularLaw(0.5)
        growth = GrowthLaw(10.0, 10.0)
        rng = np.random.default_rng(1)
        n = 0.6 * rng.random(200)
        st = SimState(0.0, n)
        dt = 1e-3
        p = law.pressure(n)
        b = n * (1.0 + dt * growth.value(p))
        new, rep = step_semi_implicit(st, grid, dt, law, growth)
        assert _mass(grid, new.n) == pytest.approx(_mass(grid, b), abs=1e-11)
        assert rep.newton_iterations >= 1

    def test_stays_below_ceiling(self):
        grid = Grid1D(-1.0, 1.0, 100)
        law = SingularLaw(0.5)
        growth = GrowthLaw(10.0, 10.0)
        cap = 10.0 / 10.5
        n = np.where(np.abs(grid.centers()) < 0.5, cap - 1e-6, 0.0)
        new, _ = step_semi_implicit(st := SimState(0.0, n), grid, 1e-3, law, growth)
        assert float(new.n.max()) <= cap + 1e-12
        assert st.t == 0.0


class TestRun:
    def test_snapshot_times_exact(self):
        cfg = RunConfig(t_final=0.05, snapshot_dt=0.01)
        traj = run(cfg)
        assert np.allclose(traj.times(), [0.0, 0.01, 0.02, 0.03, 0.04, 0.05])
        assert traj.times()[-1] == 0.05  # snapped, not accumulated

    def test_zero_horizon_single_snapshot(self):
        cfg = RunConfig(t_final=0.0, snapshot_dt=0.01)
        traj = run(cfg)
        assert len(traj.states) == 1
        assert traj.states[0].t == 0.0
        assert np.array_equal(traj.states[0].n, cfg.initial_density())

    def test_records_align_with_states(self, fig1_fast_base):
        traj = run(fig1_fast_base)
        assert len(traj.records) == len(traj.states) == len(traj.cum_grad_sq)
        for st, rec in zip(traj.states, traj.records):
            assert rec.t == st.t
            assert rec.mass == pytest.approx(_mass(fig1_fast_base.grid, st.n))

    def test_dissipation_accumulates(self, fig1_fast_base):
        traj = run(fig1_fast_base)
        assert traj.cum_grad_sq[0] == 0.0
        assert np.all(np.diff(traj.cum_grad_sq) >= 0.0)
        assert traj.cum_grad_sq[-1] > 0.0

    def test_schemes_agree_on_short_horizon(self, fig1_fast_base):
        semi = run(fig1_fast_base)
        expl = run(replace(fig1_fast_base, scheme="explicit"))
        grid = fig1_fast_base.grid
        gap = grid.h * float(np.sum(np.abs(semi.final_state.n - expl.final_state.n)))
        rel = gap / _mass(grid, expl.final_state.n)
        assert rel < 0.02

    def test_explicit_mass_conservation_without_growth(self):
        cfg = RunConfig(
            growth=None, scheme="explicit", t_final=0.05, snapshot_dt=0.05
        )
        traj = run(cfg)
        m0 = traj.records[0].mass
        assert abs(traj.records[-1].mass - m0) <= 1e-10 * m0

    def test_semi_implicit_mass_conservation_without_growth(self):
        cfg = RunConfig(growth=None, t_final=0.05, snapshot_dt=0.05)
        traj = run(cfg)
        m0 = traj.records[0].mass
        assert abs(traj.records[-1].mass - m0) <= 1e-10 * m0
