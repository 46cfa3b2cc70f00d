"""Deterministic CSV/JSON writers.

Floats print with 9 significant digits. Files are written to a ``.partial``
path and renamed into place, so an interrupted run never leaves a bare
truncated output file.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np


def _jsonable(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value)}")


def fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".partial")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    os.replace(tmp, path)
    return path


def write_json(path, payload) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".partial")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True,
                  default=_jsonable)
        fh.write("\n")
    os.replace(tmp, path)
    return path


def write_lines(path, lines) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".partial")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")
    os.replace(tmp, path)
    return path
