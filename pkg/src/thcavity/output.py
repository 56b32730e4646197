"""Deterministic artifact writers: CSV at fixed precision, JSON with sorted keys.

Identical inputs must give byte-identical files, so formatting is pinned: 17
significant digits scientific for floats, LF line endings, sorted JSON keys.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

__all__ = ["format_float", "write_csv", "write_json"]


def format_float(x) -> str:
    """17 significant digits, enough to round-trip any double exactly."""
    if isinstance(x, bool):  # bool is an int subclass; don't format it as one
        return str(x)
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return f"{x:.16e}"


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    return format_float(v)


def write_csv(path, header, rows) -> Path:
    """Write rows of numbers/strings under a comma-joined header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", newline="\n")
    return path


def _jsonable(v):
    import numpy as np

    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2)
    path.write_text(text + "\n", newline="\n")
    return path
