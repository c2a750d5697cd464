"""Figure rendering for the CLI report paths.

Each function takes an experiment result and writes one PNG next to the
delimited output.  Rendering is headless (Agg) and deterministic given
the same inputs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "simulate_figure",
    "fig1_figure",
    "sweep_figure",
    "limit_figure",
    "convergence_figure",
]

_DPI = 130


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def simulate_figure(trajectory, path) -> Path:
    """Final density/pressure profiles plus the diagnostics time series."""
    config = trajectory.config
    x = config.grid.centers()
    state = trajectory.final_state
    p = config.law.pressure(state.n)
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    ax0.plot(x, state.n, label="density n")
    ax0.plot(x, p / max(1.0, p.max()), "--", label="pressure (scaled)")
    ax0.axhline(1.0, color="gray", lw=0.8, ls=":")
    ax0.set_xlabel("x")
    ax0.set_title(f"profiles at t={state.t:g}")
    ax0.legend()
    times = [r.t for r in trajectory.records]
    ax1.plot(times, [r.mass for r in trajectory.records], label="mass")
    ax1.plot(times, [r.max_p for r in trajectory.records], label="max p")
    ax1.plot(
        times, [r.support_radius for r in trajectory.records], label="support radius"
    )
    ax1.set_xlabel("t")
    ax1.legend()
    fig.tight_layout()
    return _save(fig, path)


def fig1_figure(result, path) -> Path:
    """Side-by-side final densities for the two pressure laws."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, traj, title in (
        (axes[0], result.singular, "singular law (bounded)"),
        (axes[1], result.power, "power law (overshoots)"),
    ):
        x = traj.config.grid.centers()
        ax.plot(x, traj.final_state.n, label="density n")
        ax.axhline(1.0, color="k", ls="--", lw=0.9, label="n = 1")
        ax.set_xlabel("x")
        ax.set_title(title)
        ax.legend()
    axes[0].set_ylabel("density")
    fig.tight_layout()
    return _save(fig, path)


def sweep_figure(sweep, path) -> Path:
    """Final profiles, front trajectories vs the limit front, residuals."""
    fig, (ax0, ax1, ax2) = plt.subplots(1, 3, figsize=(14, 4))
    for eps, traj in zip(sweep.eps_list, sweep.trajectories):
        x = traj.config.grid.centers()
        ax0.plot(x, traj.final_state.n, label=f"eps={eps:g}")
    ax0.axhline(1.0, color="k", ls="--", lw=0.8)
    ax0.set_xlabel("x")
    ax0.set_ylabel("final density")
    ax0.legend(fontsize=8)
    for eps, (times, radii) in zip(sweep.eps_list, sweep.front_series):
        ax1.plot(times, radii, label=f"eps={eps:g}")
    ax1.plot(*sweep.hs_series, "k--", label="limit front")
    ax1.set_xlabel("t")
    ax1.set_ylabel("support radius")
    ax1.legend(fontsize=8)
    ax2.loglog(sweep.eps_list, sweep.residuals, "o-", label="complementary residual")
    ax2.loglog(sweep.eps_list, sweep.front_errors, "s-", label="front error")
    ax2.set_xlabel("eps")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def limit_figure(fronts, growth, path) -> Path:
    from .hele_shaw import front_speed

    times = [s.t for s in fronts]
    lengths = [s.L for s in fronts]
    speeds = [front_speed(s.L, growth) for s in fronts]
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    ax0.plot(times, lengths)
    ax0.set_xlabel("t")
    ax0.set_ylabel("patch length L")
    ax1.plot(times, speeds)
    ax1.set_xlabel("t")
    ax1.set_ylabel("front speed")
    fig.tight_layout()
    return _save(fig, path)


def convergence_figure(result, path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 4))
    h = np.array(result.h_list)
    for scheme, errs in result.errors.items():
        ax.loglog(h, errs, "o-", label=scheme)
    ref = np.array(result.errors[next(iter(result.errors))])
    ax.loglog(h, ref[0] * h / h[0], "k:", label="first order")
    ax.set_xlabel("h")
    ax.set_ylabel("L1 error")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)
