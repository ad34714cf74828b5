"""Deterministic CSV/JSON artifacts, written atomically (temp file + rename)."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

CSV_COLUMNS = ("x", "y", "z", "param", "f_resid", "stat_resid")


def fmt(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _jsonable(obj):
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return None
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return _jsonable(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def surface_csv(points, accepted_only=True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for pt in points:
        if accepted_only and not pt.accepted:
            continue
        x, y, z = pt.p
        w.writerow([fmt(x), fmt(y), fmt(z), fmt(pt.param), fmt(pt.family_residual),
                    fmt(pt.stationarity_residual)])
    return buf.getvalue()


def surface_records(points, accepted_only=True) -> list:
    out = []
    for pt in points:
        if accepted_only and not pt.accepted:
            continue
        x, y, z = pt.p
        out.append({"x": x, "y": y, "z": z, "param": pt.param,
                    "f_resid": pt.family_residual, "stat_resid": pt.stationarity_residual})
    return out


def read_points(path) -> list:
    """(x, y, z) triples from a CSV with at least x, y, z columns."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if rows and not {"x", "y", "z"} <= set(rows[0]):
        raise ValueError(f"{path}: CSV needs x, y, z columns")
    return [(float(r["x"]), float(r["y"]), float(r["z"])) for r in rows]


def read_column(path, name):
    """Float values of one CSV column, or None when the column is absent."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or name not in rows[0]:
        return None
    return [float(r[name]) for r in rows]


def points2d_csv(points, params=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("x", "y", "param"))
    for k, (x, y) in enumerate(points):
        p = params[k] if params is not None else math.nan
        w.writerow([fmt(x), fmt(y), fmt(p)])
    return buf.getvalue()
