"""Compiled inner loops for the explicit upwind integrator.

These kernels advance a density field in place from t to t_stop,
recomputing the CFL step each iteration, and return how far they got.
They are deliberately free of Python objects so numba can cache the
compiled artifacts; all law/growth parameters arrive as scalars.

Conventions shared by every kernel:

* no-flux boundaries (face fluxes at both domain ends are zero);
* face velocity v_{i+1/2} = (p_i - p_{i+1}) / h with upwind density
  (the donor cell is always the higher-pressure side);
* dt = safety * min(h^2 / (2 max_i D(n_i)), 1/G_m), clipped so the
  final step lands exactly on t_stop;
* the squared pressure-gradient dissipation sum_faces (dp)^2 * dt / h
  is accumulated at the post-step state (the state a step produces is
  weighted by that step's dt).

Status codes: 0 = reached t_stop, 1 = density left [0, 1) under the
singular law, 2 = step budget exhausted, 3 = runaway magnitude.
"""

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_OVERLAP = 1
STATUS_MAX_STEPS = 2
STATUS_RUNAWAY = 3

# Above this the power-law state is hopeless; bail out instead of
# feeding inf/nan through the flux loop.
_RUNAWAY_N = 1e12


@njit(cache=True, fastmath=True)
def advance_explicit_singular(n, t, t_stop, h, eps, g_slope, p_hom, safety, max_steps):
    """Advance n (in place) under p = eps*n/(1-n); returns (t, steps, cum, status)."""
    N = n.shape[0]
    p = np.empty(N)
    F = np.empty(N + 1)
    F[0] = 0.0
    F[N] = 0.0
    has_growth = g_slope > 0.0
    g_max = g_slope * p_hom
    cum = 0.0
    dt_prev = 0.0
    steps = 0
    while t < t_stop:
        if steps >= max_steps:
            return t, steps, cum, STATUS_MAX_STEPS
        dmax = 0.0
        for i in range(N):
            ni = n[i]
            if ni < 0.0 or ni >= 1.0:
                return t, steps, cum, STATUS_OVERLAP
            pi = eps * ni / (1.0 - ni)
            p[i] = pi
            d = pi * (pi + eps) / eps
            if d > dmax:
                dmax = d
        gsum = 0.0
        for i in range(N - 1):
            dp = p[i] - p[i + 1]
            gsum += dp * dp
            v = dp / h
            if v >= 0.0:
                F[i + 1] = v * n[i]
            else:
                F[i + 1] = v * n[i + 1]
        if steps > 0:
            cum += dt_prev * gsum / h
        dt = np.inf
        if dmax > 0.0:
            dt = safety * h * h / (2.0 * dmax)
        if has_growth:
            rcap = safety / g_max
            if rcap < dt:
                dt = rcap
        rem = t_stop - t
        if dt >= rem:
            dt = rem
            t = t_stop
        else:
            t = t + dt
        c = dt / h
        if has_growth:
            for i in range(N):
                gi = p_hom - p[i]
                if gi < 0.0:
                    gi = 0.0
                n[i] = n[i] - c * (F[i + 1] - F[i]) + dt * n[i] * g_slope * gi
        else:
            for i in range(N):
                n[i] = n[i] - c * (F[i + 1] - F[i])
        dt_prev = dt
        steps += 1
    # fold in the final state's gradient with the last step's weight
    gsum = 0.0
    for i in range(N):
        ni = n[i]
        if ni < 0.0 or ni >= 1.0:
            return t, steps, cum, STATUS_OVERLAP
        p[i] = eps * ni / (1.0 - ni)
    for i in range(N - 1):
        dp = p[i] - p[i + 1]
        gsum += dp * dp
    cum += dt_prev * gsum / h
    return t, steps, cum, STATUS_OK


@njit(cache=True, fastmath=True)
def advance_explicit_power(
    n, t, t_stop, h, gamma, g_slope, p_hom, safety, max_steps
):
    """Advance n (in place) under p = gamma/(gamma-1)*n**(gamma-1)."""
    N = n.shape[0]
    p = np.empty(N)
    F = np.empty(N + 1)
    F[0] = 0.0
    F[N] = 0.0
    coeff = gamma / (gamma - 1.0)
    gm1 = gamma - 1.0
    gm1_int = int(gm1)
    use_int = gm1 == gm1_int
    has_growth = g_slope > 0.0
    g_max = g_slope * p_hom
    cum = 0.0
    dt_prev = 0.0
    steps = 0
    while t < t_stop:
        if steps >= max_steps:
            return t, steps, cum, STATUS_MAX_STEPS
        dmax = 0.0
        for i in range(N):
            ni = n[i]
            if ni < 0.0 or ni > _RUNAWAY_N:
                return t, steps, cum, STATUS_RUNAWAY
            if use_int:
                q = ni**gm1_int
            else:
                q = ni**gm1
            p[i] = coeff * q
            d = gamma * q
            if d > dmax:
                dmax = d
        gsum = 0.0
        for i in range(N - 1):
            dp = p[i] - p[i + 1]
            gsum += dp * dp
            v = dp / h
            if v >= 0.0:
                F[i + 1] = v * n[i]
            else:
                F[i + 1] = v * n[i + 1]
        if steps > 0:
            cum += dt_prev * gsum / h
        dt = np.inf
        if dmax > 0.0:
            dt = safety * h * h / (2.0 * dmax)
        if has_growth:
            rcap = safety / g_max
            if rcap < dt:
                dt = rcap
        rem = t_stop - t
        if dt >= rem:
            dt = rem
            t = t_stop
        else:
            t = t + dt
        c = dt / h
        if has_growth:
            for i in range(N):
                gi = p_hom - p[i]
                if gi < 0.0:
                    gi = 0.0
                n[i] = n[i] - c * (F[i + 1] - F[i]) + dt * n[i] * g_slope * gi
        else:
            for i in range(N):
                n[i] = n[i] - c * (F[i + 1] - F[i])
        dt_prev = dt
        steps += 1
    gsum = 0.0
    for i in range(N):
        ni = n[i]
        if ni < 0.0 or ni > _RUNAWAY_N:
            return t, steps, cum, STATUS_RUNAWAY
        if use_int:
            q = ni**gm1_int
        else:
            q = ni**gm1
        p[i] = coeff * q
    for i in range(N - 1):
        dp = p[i] - p[i + 1]
        gsum += dp * dp
    cum += dt_prev * gsum / h
    return t, steps, cum, STATUS_OK


@njit(cache=True, fastmath=True)
def advance_pair_explicit_singular(
    na, nb, t, t_stop, h, eps, g_slope, p_hom, safety, max_steps
):
    """Advance two states with a shared dt, tracking the worst ordering gap.

    Both fields evolve under the same singular law and growth; dt is the
    smaller of the two CFL bounds each step.  Returns
    (t, steps, worst, status) where worst = max over steps and cells of
    na_i - nb_i (<= 0 means the ordering na <= nb held everywhere).
    """
    N = na.shape[0]
    pa = np.empty(N)
    pb = np.empty(N)
    Fa = np.empty(N + 1)
    Fb = np.empty(N + 1)
    Fa[0] = 0.0
    Fa[N] = 0.0
    Fb[0] = 0.0
    Fb[N] = 0.0
    has_growth = g_slope > 0.0
    g_max = g_slope * p_hom
    worst = -np.inf
    steps = 0
    for i in range(N):
        gap = na[i] - nb[i]
        if gap > worst:
            worst = gap
    while t < t_stop:
        if steps >= max_steps:
            return t, steps, worst, STATUS_MAX_STEPS
        dmax = 0.0
        for i in range(N):
            ai = na[i]
            bi = nb[i]
            if ai < 0.0 or ai >= 1.0 or bi < 0.0 or bi >= 1.0:
                return t, steps, worst, STATUS_OVERLAP
            pai = eps * ai / (1.0 - ai)
            pbi = eps * bi / (1.0 - bi)
            pa[i] = pai
            pb[i] = pbi
            d = pai * (pai + eps) / eps
            if d > dmax:
                dmax = d
            d = pbi * (pbi + eps) / eps
            if d > dmax:
                dmax = d
        for i in range(N - 1):
            v = (pa[i] - pa[i + 1]) / h
            if v >= 0.0:
                Fa[i + 1] = v * na[i]
            else:
                Fa[i + 1] = v * na[i + 1]
            v = (pb[i] - pb[i + 1]) / h
            if v >= 0.0:
                Fb[i + 1] = v * nb[i]
            else:
                Fb[i + 1] = v * nb[i + 1]
        dt = np.inf
        if dmax > 0.0:
            dt = safety * h * h / (2.0 * dmax)
        if has_growth:
            rcap = safety / g_max
            if rcap < dt:
                dt = rcap
        rem = t_stop - t
        if dt >= rem:
            dt = rem
            t = t_stop
        else:
            t = t + dt
        c = dt / h
        for i in range(N):
            ra = 0.0
            rb = 0.0
            if has_growth:
                gi = p_hom - pa[i]
                if gi < 0.0:
                    gi = 0.0
                ra = dt * na[i] * g_slope * gi
                gi = p_hom - pb[i]
                if gi < 0.0:
                    gi = 0.0
                rb = dt * nb[i] * g_slope * gi
            na[i] = na[i] - c * (Fa[i + 1] - Fa[i]) + ra
            nb[i] = nb[i] - c * (Fb[i + 1] - Fb[i]) + rb
            gap = na[i] - nb[i]
            if gap > worst:
                worst = gap
        steps += 1
    return t, steps, worst, STATUS_OK
