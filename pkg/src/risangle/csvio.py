"""Deterministic CSV emission: 9 significant digits, '.' decimal, '\\n' endings."""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if value == 0.0:
        return "0"
    return f"{value:.9g}"


def write_csv(path, header, rows):
    path = Path(path)
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    data = ("\n".join(lines) + "\n").encode("ascii")
    path.write_bytes(data)
    return path


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1"):
        return True
    if t in ("false", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_csv(path, header):
    """Rows of a CSV whose header must equal ``header``; values stay strings."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got != list(header):
            raise ValueError(f"{path}: expected header {','.join(header)}, got {got}")
        return [row for row in reader if row]
