"""Reading and writing points, traces and reports.

Trace CSV: one header row ``n,residual,step,ref_dist,<native columns>``,
then one row per step ``n = 1 .. m`` carrying ``x_n``.  ``ref_dist`` is
``d(u, x_n)`` or blank when no reference point was given.  Floats use 17
significant digits so a CSV round-trips to the same doubles.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .geometry import GeometryError, SpaceTag

FLOAT_FORMAT = "{:.17g}"


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return FLOAT_FORMAT.format(float(v))


def decode_point(space, obj):
    """Space-native JSON to a point.

    Euclidean: a coordinate list.  Hyperbolic: a Poincare-ball coordinate
    list, or ``{"poincare": [...]}`` / ``{"hyperboloid": [...]}``.  Tree:
    ``{"vertex": k}`` or ``{"edge": e, "offset": t}``.
    """
    if space.tag is SpaceTag.HYPERBOLIC and isinstance(obj, dict):
        if "hyperboloid" in obj:
            return space.point(obj["hyperboloid"])
        if "poincare" in obj:
            return space.from_poincare(obj["poincare"])
        raise GeometryError(f"cannot read hyperbolic point from {obj!r}")
    return space.from_native(obj)


def encode_point(space, x):
    return space.to_native(x)


def _native_cells(space, x):
    nat = space.to_native(x)
    if isinstance(nat, dict):
        return [fmt(nat[c]) for c in space.native_columns()]
    return [fmt(v) for v in nat]


def trace_rows(space, trace):
    header = ["n", "residual", "step", "ref_dist"] + space.native_columns()
    rows = [header]
    for k in range(trace.n_iter):
        ref = None if trace.ref_dists is None else trace.ref_dists[k]
        rows.append([str(k + 1), fmt(trace.residuals[k]), fmt(trace.steps[k]), fmt(ref)]
                    + _native_cells(space, trace.iterates[k]))
    return rows


def trace_csv(space, trace) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(trace_rows(space, trace))
    return buf.getvalue()


def write_trace_csv(path, space, trace):
    Path(path).write_text(trace_csv(space, trace))


def read_points_csv(space, text: str) -> list:
    """Points from a CSV whose header names the space's native columns."""
    reader = csv.DictReader(io.StringIO(text))
    cols = space.native_columns()
    missing = [c for c in cols if c not in (reader.fieldnames or [])]
    if missing:
        raise GeometryError(f"points CSV lacks columns {missing}")
    out = []
    for row in reader:
        if space.tag is SpaceTag.TREE:
            out.append(space.point(int(row["edge"]), float(row["offset"])))
        else:
            out.append(space.from_native([float(row[c]) for c in cols]))
    return out


def read_points(space, path) -> list:
    """Points from a JSON list of native points or from a CSV with native columns."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return read_points_csv(space, text)
    doc = json.loads(text)
    if isinstance(doc, dict):
        doc = doc.get("points")
    if not isinstance(doc, list):
        raise GeometryError("points file must hold a JSON list of points")
    return [decode_point(space, p) for p in doc]


def _clean(obj):
    # JSON has no inf or nan; write them as strings
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))
