"""CSV and JSON artifact writers.

Floats are written with ``repr``, the shortest decimal string that reloads to
the same double.
"""
from __future__ import annotations

import csv
import json
import math
from datetime import datetime, timezone
from pathlib import Path

import numpy as np


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path):
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [row for row in r]


def write_vector(path, vec):
    """Vector dump: index, real, imag."""
    vec = np.asarray(vec, dtype=complex)
    return write_csv(path, ["index", "real", "imag"],
                     ((i, float(z.real), float(z.imag)) for i, z in enumerate(vec)))


def read_vector(path):
    _, rows = read_csv(path)
    out = np.zeros(len(rows), dtype=complex)
    for row in rows:
        out[int(row[0])] = complex(float(row[1]), float(row[2]))
    return out


def write_operator(path, op):
    """Sparse operator dump in COO form: row, col, real, imag."""
    coo = op.tocoo()
    return write_csv(path, ["row", "col", "real", "imag"],
                     zip(coo.row.tolist(), coo.col.tolist(), coo.data.real.tolist(), coo.data.imag.tolist()))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path, payload, timestamp=True):
    """Sorted-key JSON; the only run-dependent field is ``timestamp``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = _jsonable(payload)
    if timestamp:
        data["timestamp"] = datetime.now(timezone.utc).isoformat()
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
    return path


def read_json(path, drop_timestamp=False):
    data = json.loads(Path(path).read_text())
    if drop_timestamp:
        data.pop("timestamp", None)
    return data
