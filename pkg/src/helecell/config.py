"""Plain-text run configuration: parsing, overrides, canonical hashing.

Config files are TOML with one optional table per concern plus
top-level shortcut keys for the common scalars; CLI overrides use the
shortcut names and win over file values.  An empty file yields the
documented defaults (the reference constants eps=0.5, g=10, P_M=10 on
[-4,4] with 1600 cells).

The canonical hash is the first 12 hex digits of the sha256 of the
sorted key=value dump of the fully resolved configuration; it names
output files so identical configs map to identical paths.
"""

from __future__ import annotations

import hashlib

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .model import (
    GaussianProfile,
    GrowthLaw,
    Grid1D,
    PlateauProfile,
    PowerLaw,
    RunConfig,
    SingularLaw,
    TableProfile,
    validate_config,
)

__all__ = ["ParseError", "parse_config", "config_dict", "config_hash"]


class ParseError(ValueError):
    """The config file (or an override) is malformed."""


_DEFAULTS = {
    "x_min": -4.0,
    "x_max": 4.0,
    "num_cells": 1600,
    "law": "singular",
    "epsilon": 0.5,
    "gamma": 20.0,
    "g_slope": 10.0,
    "p_homeostatic": 10.0,
    "profile": "plateau",
    "height": 0.8,
    "radius": 0.5,
    "width": 0.1,
    "amplitude": 0.5,
    "sigma": 0.3,
    "table_x": None,
    "table_n": None,
    "t_final": 0.1,
    "snapshot_dt": 0.01,
    "scheme": "semi_implicit",
    "cfl_safety": 0.9,
    "dt": 1e-4,
    "reaction_safety": 0.5,
    "newton_tol": 1e-12,
    "newton_max_iter": 50,
    "strict_margin": False,
    "seed": 42,
}

# section name -> {file key -> settings key}
_SECTIONS = {
    "grid": {"x_min": "x_min", "x_max": "x_max", "num_cells": "num_cells"},
    "law": {"type": "law", "epsilon": "epsilon", "gamma": "gamma"},
    "growth": {"g_slope": "g_slope", "p_homeostatic": "p_homeostatic"},
    "profile": {
        "type": "profile",
        "height": "height",
        "radius": "radius",
        "width": "width",
        "amplitude": "amplitude",
        "sigma": "sigma",
        "x": "table_x",
        "n": "table_n",
    },
    "time": {"t_final": "t_final", "snapshot_dt": "snapshot_dt"},
    "scheme": {
        "name": "scheme",
        "cfl_safety": "cfl_safety",
        "dt": "dt",
        "reaction_safety": "reaction_safety",
        "newton_tol": "newton_tol",
        "newton_max_iter": "newton_max_iter",
        "strict_margin": "strict_margin",
    },
    "run": {"seed": "seed"},
}

_TOP_LEVEL = {
    k: k
    for k in _DEFAULTS
    if k not in ("table_x", "table_n")
}

_FLOAT_KEYS = {
    "x_min", "x_max", "epsilon", "gamma", "g_slope", "p_homeostatic",
    "height", "radius", "width", "amplitude", "sigma", "t_final",
    "snapshot_dt", "cfl_safety", "dt", "reaction_safety", "newton_tol",
}
_INT_KEYS = {"num_cells", "newton_max_iter", "seed"}
_BOOL_KEYS = {"strict_margin"}
_STR_KEYS = {"law", "profile", "scheme"}


def _coerce(key: str, value, where: str):
    if key in _FLOAT_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"{where}: {key} must be a number, got {value!r}")
        return float(value)
    if key in _INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"{where}: {key} must be an integer, got {value!r}")
        return int(value)
    if key in _BOOL_KEYS:
        if not isinstance(value, bool):
            raise ParseError(f"{where}: {key} must be a boolean, got {value!r}")
        return value
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ParseError(f"{where}: {key} must be a string, got {value!r}")
        return value
    if key in ("table_x", "table_n"):
        if not isinstance(value, (list, tuple)) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            raise ParseError(f"{where}: {key} must be a list of numbers")
        return tuple(float(v) for v in value)
    raise ParseError(f"{where}: unknown key {key!r}")


def _apply_document(settings: dict, doc: dict):
    for key, value in doc.items():
        if isinstance(value, dict):
            section = _SECTIONS.get(key)
            if section is None:
                raise ParseError(f"unknown config section [{key}]")
            for sub, sub_value in value.items():
                target = section.get(sub)
                if target is None:
                    raise ParseError(f"unknown key {sub!r} in section [{key}]")
                settings[target] = _coerce(target, sub_value, f"[{key}].{sub}")
        else:
            target = _TOP_LEVEL.get(key)
            if target is None:
                raise ParseError(f"unknown top-level config key {key!r}")
            settings[target] = _coerce(target, value, key)


def _build(settings: dict) -> RunConfig:
    grid = Grid1D(settings["x_min"], settings["x_max"], settings["num_cells"])
    if settings["law"] == "singular":
        law = SingularLaw(settings["epsilon"])
    elif settings["law"] == "power":
        law = PowerLaw(settings["gamma"])
    else:
        raise ParseError(f"law must be 'singular' or 'power', got {settings['law']!r}")
    growth = (
        None
        if settings["g_slope"] == 0.0
        else GrowthLaw(settings["g_slope"], settings["p_homeostatic"])
    )
    kind = settings["profile"]
    if kind == "plateau":
        profile = PlateauProfile(
            settings["height"], settings["radius"], settings["width"]
        )
    elif kind == "gaussian":
        profile = GaussianProfile(settings["amplitude"], settings["sigma"])
    elif kind == "table":
        if settings["table_x"] is None or settings["table_n"] is None:
            raise ParseError("table profile needs [profile] x and n lists")
        profile = TableProfile(settings["table_x"], settings["table_n"])
    else:
        raise ParseError(
            f"profile must be 'plateau', 'gaussian' or 'table', got {kind!r}"
        )
    if settings["scheme"] not in ("explicit", "semi_implicit"):
        raise ParseError(
            f"scheme must be 'explicit' or 'semi_implicit', got {settings['scheme']!r}"
        )
    return RunConfig(
        grid=grid,
        law=law,
        growth=growth,
        profile=profile,
        t_final=settings["t_final"],
        snapshot_dt=settings["snapshot_dt"],
        scheme=settings["scheme"],
        cfl_safety=settings["cfl_safety"],
        dt=settings["dt"],
        reaction_safety=settings["reaction_safety"],
        newton_tol=settings["newton_tol"],
        newton_max_iter=settings["newton_max_iter"],
        strict_margin=settings["strict_margin"],
        seed=settings["seed"],
    )


def parse_config(path=None, cli_overrides: dict | None = None) -> RunConfig:
    """Resolve file + overrides into a validated RunConfig.

    ``path=None`` means no file (defaults only).  Raises ParseError for
    malformed documents or unknown keys (tomllib's message carries the
    line number) and ValidationError for semantic violations.
    """
    settings = dict(_DEFAULTS)
    if path is not None:
        try:
            with open(path, "rb") as fh:
                doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as err:
            raise ParseError(f"{path}: {err}") from err
        _apply_document(settings, doc)
    for key, value in (cli_overrides or {}).items():
        if key not in _TOP_LEVEL:
            raise ParseError(f"unknown override {key!r}")
        settings[key] = _coerce(key, value, f"override {key}")
    config = _build(settings)
    validate_config(config)
    return config


def config_dict(config: RunConfig) -> dict:
    """Flat, JSON-friendly description of a resolved config."""
    out = {
        "grid.x_min": config.grid.x_min,
        "grid.x_max": config.grid.x_max,
        "grid.num_cells": config.grid.num_cells,
        "time.t_final": config.t_final,
        "time.snapshot_dt": config.snapshot_dt,
        "scheme.name": config.scheme,
        "scheme.cfl_safety": config.cfl_safety,
        "scheme.dt": config.dt,
        "scheme.reaction_safety": config.reaction_safety,
        "scheme.newton_tol": config.newton_tol,
        "scheme.newton_max_iter": config.newton_max_iter,
        "scheme.strict_margin": config.strict_margin,
        "run.seed": config.seed,
    }
    law = config.law
    if isinstance(law, SingularLaw):
        out["law.type"] = "singular"
        out["law.epsilon"] = law.epsilon
    else:
        out["law.type"] = "power"
        out["law.gamma"] = law.gamma
    if config.growth is None:
        out["growth.g_slope"] = 0.0
    else:
        out["growth.g_slope"] = config.growth.g_slope
        out["growth.p_homeostatic"] = config.growth.p_homeostatic
    profile = config.profile
    if isinstance(profile, PlateauProfile):
        out["profile.type"] = "plateau"
        out["profile.height"] = profile.height
        out["profile.radius"] = profile.radius
        out["profile.width"] = profile.width
    elif isinstance(profile, GaussianProfile):
        out["profile.type"] = "gaussian"
        out["profile.amplitude"] = profile.amplitude
        out["profile.sigma"] = profile.sigma
    else:
        out["profile.type"] = "table"
        out["profile.x"] = list(profile.x)
        out["profile.n"] = list(profile.n)
    return out


def config_hash(config: RunConfig) -> str:
    """First 12 hex digits of the sha256 of the canonical dump."""
    payload = config_dict(config)
    lines = []
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, float):
            text = repr(value)
        elif isinstance(value, list):
            text = "[" + ",".join(repr(float(v)) for v in value) + "]"
        else:
            text = str(value)
        lines.append(f"{key}={text}")
    blob = "\n".join(lines).encode()
    return hashlib.sha256(blob).hexdigest()[:12]
