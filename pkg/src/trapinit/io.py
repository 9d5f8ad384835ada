"""Flat-file formats: fixed-column CSV with 17 significant digits and plain JSON."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

PROFILE_COLUMNS = ("r", "rho", "m", "lambda", "nu", "a", "b")
EF_COLUMNS = ("r", "a", "b", "M", "V", "v_shift")
INITIAL_DATA_COLUMNS = ("r", "M0", "V0", "a0", "b0", "a1", "av")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_columns(path, header, columns) -> Path:
    path = Path(path)
    cols = [np.asarray(c) for c in columns]
    with path.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def write_rows(path, header, rows) -> Path:
    """Write dict rows in `header` order."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(row.get(k)) for k in header) + "\n")
    return path


def read_columns(path) -> dict:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [[float(v) for v in row] for row in reader]
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return {name: arr[:, i] for i, name in enumerate(header)}


def read_rows(path) -> list:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def write_profile_csv(path, profile) -> Path:
    return write_columns(
        path, PROFILE_COLUMNS,
        (profile.r, profile.rho, profile.m, profile.lam, profile.nu, profile.a, profile.b),
    )


def write_ef_csv(path, fields) -> Path:
    return write_columns(path, EF_COLUMNS, (fields.r, fields.a, fields.b, fields.M, fields.V, fields.v_shift))


def write_initial_data_csv(path, data) -> Path:
    return write_columns(
        path, INITIAL_DATA_COLUMNS,
        (data.r, data.M0, data.V0, data.a0, data.b0, data.a1, data.av),
    )


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj) -> str:
    """Deterministic JSON; non-finite floats appear as Infinity/NaN, which json.loads accepts."""
    return json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj))
    return path


def read_json(path):
    return json.loads(Path(path).read_text())

