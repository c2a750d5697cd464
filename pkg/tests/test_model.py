"""Pressure laws, growth, profiles, and config validation."""

import math

import numpy as np
import pytest

from helecell import (
    DomainError,
    GaussianProfile,
    Grid1D,
    GrowthLaw,
    PlateauProfile,
    PowerLaw,
    RunConfig,
    SingularLaw,
    TableProfile,
    ValidationError,
    density_ceiling,
    support_margin_deficit,
    validate_config,
)

EPS_LADDER = (0.5, 0.1, 0.02, 0.004)


def _fd(fn, n, h=1e-7):
    return (fn(n + h) - fn(n - h)) / (2.0 * h)


class TestSingularLaw:
    def test_round_trip(self):
        n = np.linspace(0.01, 0.95, 40)
        for eps in EPS_LADDER:
            law = SingularLaw(eps)
            assert np.max(np.abs(law.density(law.pressure(n)) - n)) < 1e-13

    def test_state_law_identity(self):
        # (1 - n) p = eps n is exact, not approximate
        n = np.linspace(0.0, 0.99, 100)
        for eps in EPS_LADDER:
            law = SingularLaw(eps)
            p = law.pressure(n)
            assert np.max(np.abs((1.0 - n) * p - eps * n)) < 1e-12

    def test_frozen_values(self):
        law = SingularLaw(0.5)
        assert law.pressure(0.5) == pytest.approx(0.5, abs=1e-15)
        cap = 10.0 / 10.5
        assert law.pressure(cap) == pytest.approx(10.0, abs=1e-12)
        # diffusivity at the ceiling: P_M (P_M + eps) / eps
        assert law.diffusivity(cap) == pytest.approx(210.0, abs=1e-10)

    def test_ceiling_diffusivity_ladder(self):
        # D(n_cap) = P_M (P_M + eps) / eps for P_M = 10
        expected = {0.5: 210.0, 0.1: 1010.0, 0.02: 5010.0, 0.004: 25010.0}
        for eps, d in expected.items():
            law = SingularLaw(eps)
            cap = 10.0 / (10.0 + eps)
            assert law.diffusivity(cap) == pytest.approx(d, rel=1e-12)

    def test_derivatives_match_finite_differences(self):
        law = SingularLaw(0.5)
        n = np.linspace(0.05, 0.9, 25)
        assert np.max(np.abs(law.dpressure(n) - _fd(law.pressure, n))) < 1e-5
        assert np.max(np.abs(law.d2pressure(n) - _fd(law.dpressure, n))) < 1e-4

    def test_diffusivity_is_n_dpressure(self):
        law = SingularLaw(0.25)
        n = np.linspace(0.05, 0.9, 25)
        assert np.allclose(law.diffusivity(n), n * law.dpressure(n), rtol=1e-13)

    def test_potential_derivative_is_diffusivity(self):
        # H'(n) = D(n), and H''(n) = D'(n) = eps (1+n)/(1-n)^3
        law = SingularLaw(0.5)
        n = np.linspace(0.1, 0.8, 15)
        assert np.max(np.abs(_fd(law.potential, n) - law.diffusivity(n))) < 1e-5
        d2H = _fd(law.diffusivity, n)
        expected = 0.5 * (1.0 + n) / (1.0 - n) ** 3
        assert np.max(np.abs(d2H - expected) / expected) < 1e-6

    def test_potential_frozen_value(self):
        # H(n) = eps (n/(1-n) + log(1-n)); at eps=1, n=1/2: 1 + ln(1/2)
        law = SingularLaw(1.0)
        assert law.potential(0.5) == pytest.approx(1.0 + math.log(0.5), rel=1e-13)

    def test_monotone(self):
        law = SingularLaw(0.5)
        n = np.linspace(0.0, 0.97, 200)
        assert np.all(np.diff(law.pressure(n)) > 0)
        assert np.all(np.diff(law.potential(n)) >= 0)

    def test_domain_errors(self):
        law = SingularLaw(0.5)
        with pytest.raises(DomainError):
            law.pressure(np.array([1.0]))
        with pytest.raises(DomainError):
            law.pressure(np.array([-0.1]))
        with pytest.raises(ValidationError):
            SingularLaw(0.0)
        with pytest.raises(ValidationError):
            SingularLaw(-1.0)


class TestPowerLaw:
    def test_round_trip(self):
        law = PowerLaw(20.0)
        n = np.linspace(0.05, 1.4, 40)
        assert np.max(np.abs(law.density(law.pressure(n)) - n)) < 1e-12

    def test_no_ceiling(self):
        # densities above 1 are legal; pressure keeps growing
        law = PowerLaw(20.0)
        p = law.pressure(np.array([0.9, 1.0, 1.2]))
        assert np.all(np.diff(p) > 0)
        assert density_ceiling(law, GrowthLaw(10.0, 10.0)) is None

    def test_overshoot_equilibrium(self):
        # G(Pi(n)) = 0 at n = ((gamma-1)/gamma * P_M)^(1/(gamma-1))
        law = PowerLaw(20.0)
        n_eq = (19.0 / 20.0 * 10.0) ** (1.0 / 19.0)
        assert law.pressure(n_eq) == pytest.approx(10.0, rel=1e-12)
        assert n_eq == pytest.approx(1.1258, abs=1e-4)

    def test_diffusivity(self):
        law = PowerLaw(3.0)
        n = np.array([0.5, 1.0, 1.2])
        assert np.allclose(law.diffusivity(n), 3.0 * n**2, rtol=1e-13)

    def test_gamma_guard(self):
        with pytest.raises(ValidationError):
            PowerLaw(1.0)


class TestGrowthLaw:
    def test_values(self):
        g = GrowthLaw(10.0, 10.0)
        assert g.value(np.array([0.0]))[0] == pytest.approx(100.0)
        assert g.value(np.array([10.0]))[0] == 0.0
        assert g.value(np.array([12.0]))[0] == 0.0  # clamped, not negative
        assert g.g_max == pytest.approx(100.0)

    def test_monotone_nonincreasing(self):
        g = GrowthLaw(10.0, 10.0)
        p = np.linspace(0.0, 12.0, 50)
        assert np.all(np.diff(g.value(p)) <= 0)

    def test_guards(self):
        with pytest.raises(ValidationError):
            GrowthLaw(-1.0, 10.0)
        with pytest.raises(ValidationError):
            GrowthLaw(10.0, -1.0)


class TestCeiling:
    def test_singular_ceiling(self):
        law = SingularLaw(0.5)
        growth = GrowthLaw(10.0, 10.0)
        assert density_ceiling(law, growth) == pytest.approx(10.0 / 10.5, rel=1e-14)

    def test_no_growth_no_ceiling_pressure(self):
        # without growth the invariant region is just [0, 1)
        law = SingularLaw(0.5)
        cap = density_ceiling(law, None)
        assert cap is None or cap <= 1.0


class TestProfiles:
    def test_plateau_height_and_support(self):
        grid = Grid1D(-4.0, 4.0, 1600)
        n = PlateauProfile(0.8, 0.5, 0.1).sample(grid)
        x = grid.centers()
        assert n.max() == pytest.approx(0.8, rel=1e-12)
        assert np.all(n[np.abs(x) > 0.6] == 0.0)
        assert np.all(n[np.abs(x) < 0.4] == pytest.approx(0.8, rel=1e-12))

    def test_gaussian(self):
        grid = Grid1D(-4.0, 4.0, 800)
        n = GaussianProfile(0.5, 0.3).sample(grid)
        assert n.max() == pytest.approx(0.5, rel=1e-3)
        assert np.all(n >= 0.0)

    def test_table_interpolates(self):
        grid = Grid1D(0.0, 1.0, 10)
        prof = TableProfile((0.0, 1.0), (0.0, 1.0))
        n = prof.sample(grid)
        assert np.allclose(n, grid.centers(), atol=1e-12)

    def test_profile_guards(self):
        with pytest.raises(ValidationError):
            PlateauProfile(-0.1, 0.5, 0.1)
        with pytest.raises(ValidationError):
            PlateauProfile(0.8, 0.5, -0.1)
        with pytest.raises(ValidationError):
            TableProfile((0.0,), (0.0, 1.0))


class TestGrid:
    def test_centers(self):
        grid = Grid1D(0.0, 1.0, 4)
        assert grid.h == pytest.approx(0.25)
        assert np.allclose(grid.centers(), [0.125, 0.375, 0.625, 0.875])

    def test_guards(self):
        with pytest.raises(ValidationError):
            Grid1D(1.0, 0.0, 10)
        with pytest.raises(ValidationError):
            Grid1D(0.0, 1.0, 0)


class TestValidateConfig:
    def test_short_horizon_is_clean(self):
        # with theta = 1/(4 G_max) = 1/400, four barrier windows cost
        # 4 * 2 sqrt(2 * 10/400) ~ 1.8 of the 3.5 margin: no warning
        cfg = RunConfig(t_final=0.01, snapshot_dt=0.01)
        assert validate_config(cfg) == []

    def test_initial_data_above_ceiling_rejected(self):
        cfg = RunConfig(
            law=SingularLaw(0.5),
            growth=GrowthLaw(10.0, 1.0),  # ceiling 1/1.5 < plateau 0.8
        )
        with pytest.raises(ValidationError):
            validate_config(cfg)

    def test_margin_deficit_warns_not_raises(self):
        # headline horizon: the front reaches the wall, advisory only
        cfg = RunConfig(t_final=0.5, snapshot_dt=0.5)
        assert support_margin_deficit(cfg) > 0.0
        warnings = validate_config(cfg)
        assert warnings and any("margin" in w for w in warnings)

    def test_strict_margin_promotes_to_error(self):
        from dataclasses import replace

        cfg = replace(RunConfig(t_final=0.5, snapshot_dt=0.5), strict_margin=True)
        with pytest.raises(ValidationError):
            validate_config(cfg)
