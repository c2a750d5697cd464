"""Support radius, residuals, barrier windows, entropy budget, AB monitor."""

import math

import numpy as np
import pytest

from helecell import (
    BarrierSpec,
    Grid1D,
    GrowthLaw,
    RunConfig,
    SimState,
    SingularLaw,
    SpecInvalid,
    Trajectory,
    ab_monitor,
    barrier_check,
    complementary_residual,
    entropy_budget,
    record,
    support_radius,
)


class TestSupportRadius:
    def test_vacuum(self):
        grid = Grid1D(-1.0, 1.0, 10)
        assert support_radius(np.zeros(10), grid) == 0.0

    def test_single_cell(self):
        grid = Grid1D(0.0, 1.0, 4)  # centers 0.125 .. 0.875
        p = np.array([0.0, 0.0, 1.0, 0.0])
        assert support_radius(p, grid) == pytest.approx(0.625)

    def test_threshold(self):
        grid = Grid1D(0.0, 1.0, 4)
        p = np.array([0.0, 0.0, 1e-12, 0.0])
        assert support_radius(p, grid) == 0.0
        assert support_radius(p, grid, threshold=1e-13) == pytest.approx(0.625)


class TestComplementaryResidual:
    def test_zero_where_pressure_vanishes(self):
        grid = Grid1D(-1.0, 1.0, 20)
        law = SingularLaw(0.5)
        assert complementary_residual(SimState(0.0, np.zeros(20)), grid, law, None) == 0.0

    def test_weighted_by_p_squared(self):
        # constant pressure: lap = 0 interior, G > 0, residual = h sum p^2 G
        grid = Grid1D(-1.0, 1.0, 20)
        law = SingularLaw(0.5)
        growth = GrowthLaw(1.0, 2.0)
        n = np.full(20, 0.5)
        p = float(law.pressure(0.5))
        expected = grid.h * 18 * p**2 * (2.0 - p)
        got = complementary_residual(SimState(0.0, n), grid, law, growth)
        assert got == pytest.approx(expected, rel=1e-12)


class TestAbMonitor:
    def test_hand_value(self):
        # kappa ratio min over cells of t (p1 - p0) / (dt p1)
        law = SingularLaw(1.0)  # p = n/(1-n)
        prev = SimState(1.0, np.array([0.5, 0.25]))
        nxt = SimState(1.5, np.array([0.5, 0.2]))
        # p_prev = [1, 1/3], p_next = [1, 0.25]
        # ratios at t=1.5, dt=0.5: [0, 1.5*(0.25-1/3)/(0.5*0.25)]
        got = ab_monitor(prev, nxt, law, 0.5)
        assert got == pytest.approx(1.5 * (0.25 - 1.0 / 3.0) / (0.5 * 0.25), rel=1e-12)

    def test_vacuum_cells_ignored(self):
        law = SingularLaw(1.0)
        prev = SimState(1.0, np.array([0.0, 0.5]))
        nxt = SimState(1.1, np.array([0.0, 0.5]))
        assert ab_monitor(prev, nxt, law, 0.1) == 0.0


class TestRecord:
    def test_consistency(self):
        grid = Grid1D(-1.0, 1.0, 50)
        law = SingularLaw(0.5)
        n = np.where(np.abs(grid.centers()) < 0.4, 0.5, 0.0)
        st = SimState(0.25, n)
        rec = record(st, grid, law, None)
        assert rec.t == 0.25
        assert rec.mass == pytest.approx(grid.h * n.sum())
        assert rec.max_n == 0.5
        assert rec.max_p == pytest.approx(float(law.pressure(0.5)))
        assert rec.support_radius == support_radius(law.pressure(n), grid)
        assert rec.state_law_gap < 1e-15
        assert rec.ab_min_ratio is None


class TestBarrier:
    def test_spec_guard(self):
        with pytest.raises(SpecInvalid):
            BarrierSpec(C=-1.0, theta=0.1)
        with pytest.raises(SpecInvalid):
            BarrierSpec(C=1.0, theta=0.0)

    def test_initial_pressure_above_c_rejected(self):
        cfg = RunConfig(t_final=0.0, snapshot_dt=0.01)
        from helecell import run

        traj = run(cfg)
        with pytest.raises(SpecInvalid):
            barrier_check(traj, cfg.law, BarrierSpec(C=1.0, theta=0.1))

    def test_teleport_rejected(self):
        # a front that jumps across the domain in one window must fail
        cfg = RunConfig(t_final=0.0, snapshot_dt=0.01)
        grid = cfg.grid
        law = cfg.law
        n0 = cfg.initial_density()
        cap = 10.0 / 10.5
        n1 = np.where(np.abs(grid.centers()) < 3.5, cap - 1e-9, 0.0)
        fake = Trajectory(
            states=[SimState(0.0, n0), SimState(0.01, n1)],
            records=[],
            cum_grad_sq=[0.0, 0.0],
            config=cfg,
        )
        report = barrier_check(fake, law, BarrierSpec(C=10.0, theta=1.0 / 400.0))
        assert not report.passed
        assert report.max_radius_excess > 0.0

    def test_headline_run_respects_radius_bound(self, fig1):
        law = fig1.value.singular.config.law
        spec = BarrierSpec(C=10.0, theta=1.0 / 400.0)
        report = barrier_check(fig1.value.singular, law, spec)
        assert report.passed
        assert report.max_radius_excess <= 0.0
        assert len(report.times) == len(report.radii) == len(report.radius_bounds)


class TestEntropyBudget:
    def test_headline_run(self, fig1):
        traj = fig1.value.singular
        rep = entropy_budget(traj, traj.config.law, traj.config.growth)
        assert rep.passed
        assert rep.max_excess <= 0.0
        assert rep.entropy[0] == pytest.approx(traj.records[0].entropy)

    def test_no_growth_rhs_vanishes(self, drift_run):
        traj = drift_run.value
        rep = entropy_budget(traj, traj.config.law, None)
        assert rep.passed
        assert abs(rep.rhs_cumulative[-1]) <= 1e-8
        # transport strictly dissipates entropy
        assert rep.entropy[-1] < rep.entropy[0]

    def test_power_law_rejected(self):
        from helecell import PowerLaw, run
        from dataclasses import replace

        cfg = replace(
            RunConfig(t_final=0.0, snapshot_dt=0.01), law=PowerLaw(20.0)
        )
        traj = run(cfg)
        with pytest.raises(ValueError):
            entropy_budget(traj, cfg.law, cfg.growth)
