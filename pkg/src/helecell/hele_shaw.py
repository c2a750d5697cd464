"""Exact reference solution of the stiff-limit free-boundary problem in 1D.

In the incompressible limit the density saturates (n = 1) on a growing
interval [-L/2, L/2] and the pressure solves the elliptic problem

    -p'' = G(p) = g (P_M - p)   on (-L/2, L/2),   p(+-L/2) = 0,

whose closed form is p(x) = P_M (1 - cosh(sqrt(g) x)/cosh(sqrt(g) L/2)).
The interface moves with the Darcy velocity -p'(L/2), giving the front
ODE  dL/dt = 2 P_M sqrt(g) tanh(sqrt(g) L / 2), integrated here with
classical RK4.  This gives a quantitative target for the stiff-law
solver's support radius as the law parameter is driven to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GrowthLaw, ValidationError

__all__ = ["FrontState", "patch_pressure", "front_speed", "evolve_front"]


@dataclass(frozen=True)
class FrontState:
    t: float
    L: float


def patch_pressure(L: float, growth: GrowthLaw, x):
    """Pressure of the saturated patch [-L/2, L/2]; 0 outside.

    Evaluated in overflow-safe form: cosh(a*x)/cosh(a*L/2) is computed
    from exponentials with nonpositive arguments, so arbitrarily stiff
    growth or wide patches stay finite.  p(+-L/2) is exactly 0.
    """
    if L <= 0.0:
        raise ValidationError(f"patch length must be positive, got {L}")
    x = np.asarray(x, dtype=np.float64)
    a = math.sqrt(growth.g_slope)
    half = 0.5 * L
    ax = np.minimum(np.abs(x), half)
    # cosh(a*ax)/cosh(a*half) with all exponents <= 0
    ratio = np.exp(a * (ax - half)) * (1.0 + np.exp(-2.0 * a * ax)) / (
        1.0 + math.exp(-2.0 * a * half)
    )
    p = growth.p_homeostatic * (1.0 - ratio)
    return np.where(np.abs(x) < half, p, 0.0)


def front_speed(L: float, growth: GrowthLaw | None) -> float:
    """Interface velocity of the saturated patch, P_M sqrt(g) tanh(sqrt(g) L/2)."""
    if growth is None:
        return 0.0
    if L <= 0.0:
        return 0.0
    a = math.sqrt(growth.g_slope)
    return growth.p_homeostatic * a * math.tanh(0.5 * a * L)


def evolve_front(
    L0: float, growth: GrowthLaw | None, T: float, dt: float = 1e-4
) -> list:
    """RK4 integration of dL/dt = 2 * front_speed(L) from L0 to time T.

    The step is adjusted to T/ceil(T/dt) so the sequence lands exactly
    on T; returns FrontState at every step including t=0.
    """
    if L0 <= 0.0:
        raise ValidationError(f"initial patch length must be positive, got {L0}")
    if dt <= 0.0:
        raise ValidationError(f"dt must be positive, got {dt}")
    out = [FrontState(0.0, L0)]
    if T <= 0.0:
        return out

    def f(L):
        return 2.0 * front_speed(L, growth)

    m = max(1, math.ceil(T / dt - 1e-9))
    step = T / m
    L = L0
    for k in range(m):
        k1 = f(L)
        k2 = f(L + 0.5 * step * k1)
        k3 = f(L + 0.5 * step * k2)
        k4 = f(L + step * k3)
        L = L + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out.append(FrontState((k + 1) * step, L))
    return out
