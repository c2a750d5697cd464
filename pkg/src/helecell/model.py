"""Constitutive laws, grid, initial data, and run configuration.

The model evolves a cell density n(t, x) on a 1D interval with no-flux
boundaries:

    dn/dt - d/dx(n dp/dx) = n G(p),

where the pressure p is a constitutive function of the density and the
growth rate G shuts off at a homeostatic pressure.  Two pressure laws
are supported:

* ``SingularLaw``: p = eps * n / (1 - n).  The pressure blows up at the
  packing density n = 1, which keeps the density strictly below 1; the
  growth law caps it further at the ceiling P_M / (P_M + eps).
* ``PowerLaw``: p = gamma/(gamma-1) * n**(gamma-1).  No finite ceiling,
  so the density may overshoot 1 (the classical porous-medium regime).

Both laws expose the integrated diffusion potential
H(n) = int_0^n u p'(u) du, so the equation can equivalently be written
dn/dt - d2/dx2 H(n) = n G(p); the semi-implicit solver discretises that
form while the explicit solver uses the Darcy flux directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "DomainError",
    "ValidationError",
    "SingularLaw",
    "PowerLaw",
    "PressureLaw",
    "GrowthLaw",
    "Grid1D",
    "PlateauProfile",
    "GaussianProfile",
    "TableProfile",
    "InitialProfile",
    "SimState",
    "RunConfig",
    "density_ceiling",
    "support_margin_deficit",
    "validate_config",
]

# Densities are never allowed to touch the singular point n = 1.
N_GUARD = 1.0 - 1e-12


class DomainError(ValueError):
    """A field value lies outside the domain of a constitutive law."""


class ValidationError(ValueError):
    """A run configuration violates one of its invariants."""


def _as_field(n):
    return np.asarray(n, dtype=np.float64)


@dataclass(frozen=True)
class SingularLaw:
    """Singular pressure law p(n) = eps * n / (1 - n) on n in [0, 1)."""

    epsilon: float

    def __post_init__(self):
        if not (self.epsilon > 0.0 and math.isfinite(self.epsilon)):
            raise ValidationError(f"epsilon must be a positive real, got {self.epsilon}")

    def _check(self, n):
        if np.any(n < 0.0) or np.any(n >= 1.0):
            raise DomainError("singular law needs densities in [0, 1)")

    def pressure(self, n):
        n = _as_field(n)
        self._check(n)
        return self.epsilon * n / (1.0 - n)

    def density(self, p):
        p = _as_field(p)
        if np.any(p < 0.0):
            raise DomainError("pressure must be nonnegative")
        return p / (self.epsilon + p)

    def dpressure(self, n):
        n = _as_field(n)
        self._check(n)
        return self.epsilon / (1.0 - n) ** 2

    def d2pressure(self, n):
        n = _as_field(n)
        self._check(n)
        return 2.0 * self.epsilon / (1.0 - n) ** 3

    def diffusivity(self, n):
        # n p'(n) = eps * n / (1-n)^2, the mobility of the H-form.
        n = _as_field(n)
        self._check(n)
        return self.epsilon * n / (1.0 - n) ** 2

    def potential(self, n):
        # H(n) = int_0^n u p'(u) du = eps * (n/(1-n) + log(1-n)); H(0) = 0.
        n = _as_field(n)
        self._check(n)
        return self.epsilon * (n / (1.0 - n) + np.log1p(-n))


@dataclass(frozen=True)
class PowerLaw:
    """Porous-medium pressure law p(n) = gamma/(gamma-1) * n**(gamma-1)."""

    gamma: float

    def __post_init__(self):
        if not (self.gamma > 1.0 and math.isfinite(self.gamma)):
            raise ValidationError(f"gamma must exceed 1, got {self.gamma}")

    @property
    def _coeff(self):
        return self.gamma / (self.gamma - 1.0)

    def _check(self, n):
        if np.any(n < 0.0):
            raise DomainError("power law needs densities in [0, inf)")

    def pressure(self, n):
        n = _as_field(n)
        self._check(n)
        return self._coeff * n ** (self.gamma - 1.0)

    def density(self, p):
        p = _as_field(p)
        if np.any(p < 0.0):
            raise DomainError("pressure must be nonnegative")
        return (p / self._coeff) ** (1.0 / (self.gamma - 1.0))

    def dpressure(self, n):
        n = _as_field(n)
        self._check(n)
        return self.gamma * n ** (self.gamma - 2.0)

    def d2pressure(self, n):
        n = _as_field(n)
        self._check(n)
        return self.gamma * (self.gamma - 2.0) * n ** (self.gamma - 3.0)

    def diffusivity(self, n):
        n = _as_field(n)
        self._check(n)
        return self.gamma * n ** (self.gamma - 1.0)

    def potential(self, n):
        # H(n) = int_0^n u p'(u) du = n**gamma.
        n = _as_field(n)
        self._check(n)
        return n**self.gamma


PressureLaw = Union[SingularLaw, PowerLaw]


@dataclass(frozen=True)
class GrowthLaw:
    """Pressure-inhibited growth G(p) = g_slope * (p_homeostatic - p)_+."""

    g_slope: float
    p_homeostatic: float

    def __post_init__(self):
        if not (self.g_slope > 0.0 and math.isfinite(self.g_slope)):
            raise ValidationError(f"g_slope must be positive, got {self.g_slope}")
        if not (self.p_homeostatic > 0.0 and math.isfinite(self.p_homeostatic)):
            raise ValidationError(
                f"p_homeostatic must be positive, got {self.p_homeostatic}"
            )

    def value(self, p):
        p = _as_field(p)
        return self.g_slope * np.maximum(self.p_homeostatic - p, 0.0)

    @property
    def g_max(self):
        """Maximal growth rate G(0) = g_slope * p_homeostatic."""
        return self.g_slope * self.p_homeostatic


def density_ceiling(law: PressureLaw, growth: GrowthLaw | None) -> float | None:
    """A-priori ceiling for the density, or None when the law gives none.

    For the singular law the growth shutoff at p = P_M pins the bulk
    density at N(P_M) = P_M / (P_M + eps) < 1, and constant states at
    that value are stationary, so no compliant evolution exceeds it.
    The power law admits densities above 1 and has no a-priori cap.
    """
    if isinstance(law, SingularLaw) and growth is not None:
        return growth.p_homeostatic / (growth.p_homeostatic + law.epsilon)
    return None


@dataclass(frozen=True)
class Grid1D:
    """Uniform cell-centered grid on [x_min, x_max]."""

    x_min: float
    x_max: float
    num_cells: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValidationError("grid needs x_min < x_max")
        if self.num_cells < 3:
            raise ValidationError("grid needs at least 3 cells")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.num_cells

    def centers(self) -> np.ndarray:
        h = self.h
        return self.x_min + h * (np.arange(self.num_cells) + 0.5)


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


@dataclass(frozen=True)
class PlateauProfile:
    """Smoothed plateau of given height, supported on |x| < radius.

    n0(x) = height * s((radius - |x|) / width) with s the cubic
    smoothstep; the profile is flat at `height` for |x| <= radius - width.
    """

    height: float = 0.8
    radius: float = 0.5
    width: float = 0.1

    def __post_init__(self):
        if not (self.height > 0.0 and self.radius > 0.0 and self.width > 0.0):
            raise ValidationError("plateau parameters must be positive")
        if self.width > self.radius:
            raise ValidationError("plateau smoothing width exceeds its radius")

    def sample(self, grid: Grid1D) -> np.ndarray:
        x = grid.centers()
        return self.height * _smoothstep((self.radius - np.abs(x)) / self.width)


@dataclass(frozen=True)
class GaussianProfile:
    """Gaussian bump amplitude * exp(-x^2 / (2 sigma^2))."""

    amplitude: float = 0.5
    sigma: float = 0.3

    def __post_init__(self):
        if not (self.amplitude > 0.0 and self.sigma > 0.0):
            raise ValidationError("gaussian parameters must be positive")

    def sample(self, grid: Grid1D) -> np.ndarray:
        x = grid.centers()
        return self.amplitude * np.exp(-0.5 * (x / self.sigma) ** 2)


@dataclass(frozen=True)
class TableProfile:
    """Piecewise-linear profile through (x, n) pairs; zero outside."""

    x: tuple
    n: tuple

    def __post_init__(self):
        if len(self.x) != len(self.n) or len(self.x) < 2:
            raise ValidationError("table profile needs matching x/n lists, length >= 2")
        if any(b <= a for a, b in zip(self.x, self.x[1:])):
            raise ValidationError("table profile abscissae must increase")

    def sample(self, grid: Grid1D) -> np.ndarray:
        return np.interp(grid.centers(), self.x, self.n, left=0.0, right=0.0)


InitialProfile = Union[PlateauProfile, GaussianProfile, TableProfile]


@dataclass(frozen=True)
class SimState:
    """Density field at one instant; treated as immutable."""

    t: float
    n: np.ndarray

    def __post_init__(self):
        arr = np.array(self.n, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "n", arr)


@dataclass(frozen=True)
class RunConfig:
    """Everything a solver run needs; defaults match the headline
    dichotomy setup (the `fig1` report) apart from the shorter horizon.

    `scheme` picks the integrator: "explicit" is the monotone upwind
    scheme under its CFL restriction, "semi_implicit" treats the
    diffusion implicitly (Newton) with the reaction explicit and a fixed
    target step `dt` (reduced automatically when the reaction would be
    unstable near the density ceiling).
    """

    grid: Grid1D = field(default_factory=lambda: Grid1D(-4.0, 4.0, 1600))
    law: PressureLaw = field(default_factory=lambda: SingularLaw(0.5))
    growth: GrowthLaw | None = field(default_factory=lambda: GrowthLaw(10.0, 10.0))
    profile: InitialProfile = field(default_factory=PlateauProfile)
    t_final: float = 0.1
    snapshot_dt: float = 0.01
    scheme: str = "semi_implicit"
    cfl_safety: float = 0.9
    dt: float = 1e-4
    reaction_safety: float = 0.5
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    strict_margin: bool = False
    seed: int = 42

    def initial_density(self) -> np.ndarray:
        return self.profile.sample(self.grid)


def support_margin_deficit(config: RunConfig) -> float:
    """How far the barrier-predicted support growth overruns the grid.

    The finite-propagation barrier advances the support by at most
    2*sqrt(2*C*theta) per window of length theta = 1/(4*G_m), with
    C = p_homeostatic.  Returns predicted_final_radius - domain_radius;
    positive values mean the barrier estimate cannot exclude the front
    reaching the boundary before t_final.  Without growth the support
    cannot expand at all (pure degenerate diffusion keeps it inside the
    initial support's closure for the barrier's purposes), so the
    deficit is measured on the initial support alone.
    """
    n0 = config.initial_density()
    x = config.grid.centers()
    occupied = np.abs(x[n0 > 0.0])
    r0 = float(occupied.max()) if occupied.size else 0.0
    domain_radius = min(-config.grid.x_min, config.grid.x_max)
    if config.growth is None:
        return r0 - domain_radius
    c_bar = config.growth.p_homeostatic
    theta = 1.0 / (4.0 * config.growth.g_max)
    windows = math.ceil(config.t_final / theta)
    predicted = r0 + windows * 2.0 * math.sqrt(2.0 * c_bar * theta)
    return predicted - domain_radius


def validate_config(config: RunConfig, compact_support: bool = True) -> list[str]:
    """Check RunConfig invariants.

    Raises ValidationError for hard violations; returns a list of
    non-fatal warnings (promoted to errors when strict_margin is set).
    ``compact_support=False`` skips the compact-support and barrier
    margin checks — appropriate for forced (manufactured) problems
    where finite propagation does not apply.
    """
    warnings: list[str] = []
    if not (config.t_final >= 0.0 and math.isfinite(config.t_final)):
        raise ValidationError("t_final must be nonnegative")
    if not (0.0 < config.snapshot_dt):
        raise ValidationError("snapshot_dt must be positive")
    if config.scheme not in ("explicit", "semi_implicit"):
        raise ValidationError(f"unknown scheme {config.scheme!r}")
    if not (0.0 < config.cfl_safety <= 1.0):
        raise ValidationError("cfl_safety must lie in (0, 1]")
    if not (0.0 < config.reaction_safety <= 1.0):
        raise ValidationError("reaction_safety must lie in (0, 1]")
    if config.dt <= 0.0:
        raise ValidationError("dt must be positive")
    if config.newton_max_iter < 1:
        raise ValidationError("newton_max_iter must be at least 1")

    n0 = config.initial_density()
    if np.any(n0 < 0.0):
        raise ValidationError("initial density must be nonnegative")
    if isinstance(config.law, SingularLaw):
        ceiling = density_ceiling(config.law, config.growth)
        cap = N_GUARD if ceiling is None else ceiling
        if np.any(n0 > cap):
            raise ValidationError(
                "initial density exceeds the law's ceiling "
                f"(max {float(n0.max()):.6g} > {cap:.6g})"
            )
    if not compact_support:
        return warnings
    if n0[0] > 0.0 or n0[-1] > 0.0:
        raise ValidationError("initial support touches the domain boundary")

    deficit = support_margin_deficit(config)
    if deficit > 0.0:
        msg = (
            "initial support too close to boundary for the barrier margin "
            f"(predicted overrun {deficit:.3g})"
        )
        if config.strict_margin:
            raise ValidationError(msg)
        warnings.append(msg)
    return warnings
