"""Deterministic plain-text emission: profile dumps, diagnostics CSV,
front CSV, JSON summaries.

All floats are written with repr (shortest round-tripping form), so
re-running an identical config produces byte-identical files and a
parse → emit cycle is the identity.  No timestamps anywhere; files are
named by the config hash upstream.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .diagnostics import DiagnosticsRecord

__all__ = [
    "SERIES_COLUMNS",
    "emit_profile",
    "emit_series",
    "parse_series",
    "emit_front",
    "write_json",
]

# fixed diagnostics CSV column order (header names)
SERIES_COLUMNS = (
    "t",
    "mass",
    "max_n",
    "max_p",
    "support_radius",
    "bv",
    "compl_residual",
    "state_law_gap",
    "grad_p_l2_sq",
    "entropy",
    "ab_min_ratio",
)

# record attribute behind each column
_FIELDS = (
    "t",
    "mass",
    "max_n",
    "max_p",
    "support_radius",
    "bv_seminorm",
    "compl_residual_l1",
    "state_law_gap",
    "grad_p_l2_sq",
    "entropy",
    "ab_min_ratio",
)


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_profile(state, grid, law, path, config_hash: str | None = None) -> Path:
    """Write the (x, n, p) profile; a companion `<stem>.ref1<ext>` file
    carries the constant-1 reference line for plotting against."""
    path = Path(path)
    x = grid.centers()
    n = state.n
    p = law.pressure(n)
    lines = []
    if config_hash is not None:
        lines.append(f"# config: {config_hash}")
    lines.append("# columns: x n p")
    for xi, ni, pi in zip(x, n, p):
        lines.append(f"{_fmt(xi)} {_fmt(ni)} {_fmt(pi)}")
    path.write_text("\n".join(lines) + "\n")
    companion = path.with_name(path.stem + ".ref1" + path.suffix)
    ref_lines = ["# columns: x one"]
    for xi in x:
        ref_lines.append(f"{_fmt(xi)} 1.0")
    companion.write_text("\n".join(ref_lines) + "\n")
    return path


def emit_series(records, path, config_hash: str | None = None) -> Path:
    """One CSV row per snapshot in the fixed column order."""
    path = Path(path)
    lines = []
    if config_hash is not None:
        lines.append(f"# config: {config_hash}")
    lines.append(",".join(SERIES_COLUMNS))
    for rec in records:
        cells = []
        for field in _FIELDS:
            value = getattr(rec, field)
            cells.append("" if value is None else _fmt(value))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
    return path


def parse_series(path) -> list:
    """Inverse of emit_series (comments and header skipped)."""
    records = []
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#") or line.startswith("t,"):
            continue
        cells = line.split(",")
        if len(cells) != len(_FIELDS):
            raise ValueError(f"{path}: expected {len(_FIELDS)} columns, got {len(cells)}")
        values = [None if c == "" else float(c) for c in cells]
        records.append(DiagnosticsRecord(**dict(zip(_FIELDS, values))))
    return records


def emit_front(fronts, growth, path, config_hash: str | None = None) -> Path:
    """CSV of the reference front: t, L, speed."""
    from .hele_shaw import front_speed

    path = Path(path)
    lines = []
    if config_hash is not None:
        lines.append(f"# config: {config_hash}")
    lines.append("t,L,speed")
    for state in fronts:
        lines.append(
            f"{_fmt(state.t)},{_fmt(state.L)},{_fmt(front_speed(state.L, growth))}"
        )
    path.write_text("\n".join(lines) + "\n")
    return path


def _jsonable(value):
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
        return repr(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(path, payload: dict) -> Path:
    """Deterministic JSON dump (sorted keys, no timestamps)."""
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    return path
