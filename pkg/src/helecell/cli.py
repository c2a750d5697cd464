"""Command-line entry point.

Subcommands: simulate, fig1, sweep, limit, check, converge.  Global
flags (--config, --out-dir, --seed) are accepted before or after the
subcommand.  Exit codes: 0 success, 1 validation/parse failure,
2 property-suite failure, 3 solver failure.  Output files land in
--out-dir (or $HELECELL_OUT_DIR, or ./out) and are named
<experiment>_<confighash>.<ext> so identical configs overwrite their
own artifacts deterministically.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import figures
from .checks import run_suite
from .config import ParseError, config_dict, config_hash, parse_config
from .diagnostics import SpecInvalid
from .experiments import (
    DEFAULT_EPS_LADDER,
    convergence_study,
    epsilon_sweep,
    fig1_experiment,
    mms_base,
)
from .hele_shaw import FrontState, evolve_front, front_speed
from .model import DomainError, RunConfig, ValidationError
from .output import emit_front, emit_profile, emit_series, write_json
from .solver import SolverError, run

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PROPERTY = 2
EXIT_SOLVER = 3

# settings keys (see config._DEFAULTS) that simulate exposes as flags
_OVERRIDE_FLAGS = (
    ("--law", "law", str, "pressure law: singular | power"),
    ("--epsilon", "epsilon", float, "singular-law stiffness (default 0.5)"),
    ("--gamma", "gamma", float, "power-law exponent (default 20)"),
    ("--g-slope", "g_slope", float,
     "growth slope g in g*(P_M - p)+; 0 disables growth (default 10)"),
    ("--p-homeostatic", "p_homeostatic", float,
     "homeostatic pressure P_M (default 10)"),
    ("--t-final", "t_final", float, "integration horizon (default 0.1)"),
    ("--snapshot-dt", "snapshot_dt", float,
     "diagnostics sampling interval (default 0.01)"),
    ("--scheme", "scheme", str, "explicit | semi_implicit (default)"),
    ("--dt", "dt", float, "semi-implicit base step (default 1e-4)"),
    ("--cfl-safety", "cfl_safety", float,
     "explicit-scheme CFL fraction (default 0.9)"),
    ("--num-cells", "num_cells", int, "grid resolution (default 1600)"),
)
_OVERRIDE_KEYS = frozenset(k for _, k, _, _ in _OVERRIDE_FLAGS) | {
    "strict_margin", "seed"
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports bad usage via exception, not SystemExit(2)."""

    def error(self, message):
        raise _UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument(
        "--config", metavar="PATH", default=argparse.SUPPRESS,
        help="TOML config file (default: built-in defaults)",
    )
    p.add_argument(
        "--out-dir", metavar="PATH", default=argparse.SUPPRESS,
        help="output directory (default: $HELECELL_OUT_DIR or ./out)",
    )
    p.add_argument(
        "--seed", type=int, metavar="N", default=argparse.SUPPRESS,
        help="seed for randomized suites (default: 42)",
    )
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(
        prog="helecell",
        description="Congested tissue-growth lab: stiff pressure laws, "
        "verified bounds, and the saturated-front limit.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p_sim = sub.add_parser(
        "simulate", parents=[common],
        help="run one configuration and emit series/profile/figure",
    )
    for flag, dest, typ, help_text in _OVERRIDE_FLAGS:
        p_sim.add_argument(
            flag, dest=dest, type=typ, default=argparse.SUPPRESS, help=help_text
        )
    p_sim.add_argument(
        "--strict-margin", dest="strict_margin", action="store_true",
        default=argparse.SUPPRESS,
        help="refuse configs whose support could reach the walls",
    )
    p_sim.set_defaults(func=_cmd_simulate)

    p_fig1 = sub.add_parser(
        "fig1", parents=[common],
        help="two-law contrast: bounded singular vs overshooting power law",
    )
    p_fig1.set_defaults(func=_cmd_fig1)

    p_sweep = sub.add_parser(
        "sweep", parents=[common],
        help="stiffness ladder toward the saturated-front limit",
    )
    p_sweep.add_argument(
        "--eps", metavar="E1,E2,...", default=None,
        help="comma-separated decreasing stiffness ladder "
        f"(default {','.join(repr(e) for e in DEFAULT_EPS_LADDER)})",
    )
    p_sweep.set_defaults(func=_cmd_sweep)

    p_limit = sub.add_parser(
        "limit", parents=[common],
        help="evolve the closed-form saturated-patch front",
    )
    p_limit.add_argument("--L0", type=float, default=1.0,
                         help="initial patch length (default 1.0)")
    p_limit.add_argument("--T", type=float, default=1.0,
                         help="horizon (default 1.0)")
    p_limit.add_argument("--dt", type=float, default=1e-4,
                         help="integrator step (default 1e-4)")
    p_limit.set_defaults(func=_cmd_limit)

    p_check = sub.add_parser(
        "check", parents=[common],
        help="run the runtime property suites",
    )
    p_check.add_argument(
        "--suite", choices=("laws", "solver", "diagnostics", "comparison", "all"),
        default="all", help="which suite to run (default all)",
    )
    p_check.set_defaults(func=_cmd_check)

    p_conv = sub.add_parser(
        "converge", parents=[common],
        help="manufactured-solution refinement study for both schemes",
    )
    p_conv.add_argument(
        "--levels", type=int, default=3,
        help="ladder length; level i uses h = 1/(50*2^i) (default 3)",
    )
    p_conv.set_defaults(func=_cmd_converge)
    return parser


def _out_dir(ns) -> Path:
    chosen = getattr(ns, "out_dir", None) or os.environ.get("HELECELL_OUT_DIR")
    path = Path(chosen) if chosen else Path("./out")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _overrides(ns) -> dict:
    return {k: v for k, v in vars(ns).items() if k in _OVERRIDE_KEYS}


def _tag(config: RunConfig, extras: dict | None = None) -> str:
    base = config_hash(config)
    if not extras:
        return base
    blob = base + "|" + repr(sorted(extras.items()))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _announce(path: Path):
    print(f"wrote {path}")


def _cmd_simulate(ns) -> int:
    config = parse_config(getattr(ns, "config", None), _overrides(ns))
    out = _out_dir(ns)
    tag = config_hash(config)
    trajectory = run(config)
    _announce(emit_series(trajectory.records, out / f"simulate_{tag}.csv", tag))
    _announce(
        emit_profile(
            trajectory.final_state, config.grid, config.law,
            out / f"simulate_{tag}_profile.dat", tag,
        )
    )
    final = asdict(trajectory.records[-1])
    _announce(
        write_json(
            out / f"simulate_{tag}.json",
            {"config": config_dict(config), "final": final},
        )
    )
    _announce(figures.simulate_figure(trajectory, out / f"simulate_{tag}.png"))
    print(
        f"final t={trajectory.final_state.t!r} mass={final['mass']!r} "
        f"max_n={final['max_n']!r} max_p={final['max_p']!r}"
    )
    return EXIT_OK


def _cmd_fig1(ns) -> int:
    base = (
        parse_config(ns.config, _overrides(ns))
        if getattr(ns, "config", None)
        else None
    )
    result = fig1_experiment(base)
    out = _out_dir(ns)
    tag = config_hash(result.singular.config)
    for name, traj in (("singular", result.singular), ("power", result.power)):
        _announce(emit_series(traj.records, out / f"fig1_{tag}_{name}.csv", tag))
        _announce(
            emit_profile(
                traj.final_state, traj.config.grid, traj.config.law,
                out / f"fig1_{tag}_{name}.dat", tag,
            )
        )
    passed = result.singular_bounded and result.power_exceeds_one
    _announce(
        write_json(
            out / f"fig1_{tag}.json",
            {
                "ceiling": result.ceiling,
                "singular_max_n": result.singular_max_n,
                "power_max_n": result.power_max_n,
                "singular_bounded": result.singular_bounded,
                "power_exceeds_one": result.power_exceeds_one,
                "passed": passed,
            },
        )
    )
    _announce(figures.fig1_figure(result, out / f"fig1_{tag}.png"))
    print(
        f"singular max_n={result.singular_max_n!r} (ceiling {result.ceiling!r}), "
        f"power max_n={result.power_max_n!r}"
    )
    if not passed:
        print("fig1 dichotomy violated", file=sys.stderr)
        return EXIT_PROPERTY
    print("PASS fig1 dichotomy")
    return EXIT_OK


def _parse_eps(text: str) -> list:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as err:
        raise ParseError(f"--eps: {err}") from None
    if not values:
        raise ParseError("--eps: empty ladder")
    return values


def _strictly_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def _cmd_sweep(ns) -> int:
    eps_list = (
        _parse_eps(ns.eps) if ns.eps is not None else list(DEFAULT_EPS_LADDER)
    )
    base = (
        parse_config(ns.config, _overrides(ns))
        if getattr(ns, "config", None)
        else None
    )
    result = epsilon_sweep(eps_list, config=base)
    out = _out_dir(ns)
    tag = _tag(result.config, {"eps": tuple(eps_list)})
    for eps, traj in zip(result.eps_list, result.trajectories):
        _announce(
            emit_series(traj.records, out / f"sweep_{tag}_eps{eps!r}.csv", tag)
        )
    hs_fronts = [
        FrontState(t, 2.0 * r) for t, r in zip(result.hs_series[0], result.hs_series[1])
    ]
    _announce(
        emit_front(
            hs_fronts, result.config.growth, out / f"sweep_{tag}_front.csv", tag
        )
    )
    verdicts = {
        "residuals_decreasing": _strictly_decreasing(result.residuals),
        "l1_distances_decreasing": _strictly_decreasing(result.l1_distances),
        "eps_mass_decreasing": _strictly_decreasing(result.eps_mass),
        "front_errors_decreasing": _strictly_decreasing(result.front_errors),
    }
    payload = {
        "eps": result.eps_list,
        "residuals": result.residuals,
        "l1_distances": result.l1_distances,
        "front_errors": result.front_errors,
        "eps_mass": result.eps_mass,
        "kappa_hats": result.kappa_hats,
        "verdicts": verdicts,
    }
    _announce(write_json(out / f"sweep_{tag}.json", payload))
    _announce(figures.sweep_figure(result, out / f"sweep_{tag}.png"))
    for name, ok in verdicts.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    failed = [name for name, ok in verdicts.items() if not ok]
    if failed:
        print("sweep verdicts failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


def _cmd_limit(ns) -> int:
    config = parse_config(getattr(ns, "config", None), _overrides(ns))
    if config.growth is None:
        raise ValidationError("the saturated front needs a growth law (g_slope > 0)")
    fronts = evolve_front(ns.L0, config.growth, ns.T, dt=ns.dt)
    out = _out_dir(ns)
    tag = _tag(config, {"L0": ns.L0, "T": ns.T, "dt": ns.dt})
    _announce(emit_front(fronts, config.growth, out / f"limit_{tag}.csv", tag))
    final = fronts[-1]
    _announce(
        write_json(
            out / f"limit_{tag}.json",
            {
                "L0": ns.L0,
                "T": ns.T,
                "final_L": final.L,
                "final_speed": front_speed(final.L, config.growth),
                "speed_ceiling": config.growth.p_homeostatic
                * config.growth.g_slope**0.5,
            },
        )
    )
    _announce(figures.limit_figure(fronts, config.growth, out / f"limit_{tag}.png"))
    return EXIT_OK


def _cmd_check(ns) -> int:
    results = run_suite(ns.suite, seed=getattr(ns, "seed", 42))
    failed = []
    for res in results:
        line = f"{'PASS' if res.passed else 'FAIL'} {res.suite}.{res.name}"
        if res.detail:
            line += f" ({res.detail})"
        print(line)
        if not res.passed:
            failed.append(f"{res.suite}.{res.name}")
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print("failed invariants: " + ", ".join(failed), file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


def _cmd_converge(ns) -> int:
    if ns.levels < 2:
        raise ValidationError("--levels must be at least 2")
    base = (
        parse_config(ns.config, _overrides(ns))
        if getattr(ns, "config", None)
        else mms_base()
    )
    h_list = [1.0 / (50.0 * 2.0**i) for i in range(ns.levels)]
    result = convergence_study(h_list, base=base)
    out = _out_dir(ns)
    tag = _tag(base, {"levels": ns.levels})
    _announce(
        write_json(
            out / f"converge_{tag}.json",
            {
                "h": result.h_list,
                "errors": result.errors,
                "orders": result.orders,
                "t_final": result.t_final,
            },
        )
    )
    _announce(figures.convergence_figure(result, out / f"converge_{tag}.png"))
    for scheme, orders in sorted(result.orders.items()):
        printable = ", ".join(f"{o:.3f}" for o in orders)
        print(f"{scheme}: observed orders [{printable}]")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return ns.func(ns)
    except (ParseError, ValidationError, DomainError, SpecInvalid, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
