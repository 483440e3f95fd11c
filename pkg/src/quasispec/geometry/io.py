"""Curve files: a JSON array of [x, y] pairs, or two-column CSV."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .curves import CurveError, PolygonalCurve


def parse_curve(text: str, fmt: str | None = None) -> PolygonalCurve:
    text = text.strip()
    if fmt is None:
        fmt = "json" if text.startswith("[") else "csv"
    if fmt == "json":
        pts = json.loads(text)
    elif fmt == "csv":
        pts = []
        for row in csv.reader(io.StringIO(text)):
            if not row or not "".join(row).strip():
                continue
            try:
                pts.append([float(row[0]), float(row[1])])
            except ValueError:
                if pts:
                    raise CurveError(f"bad CSV row {row!r}") from None
                # header line
    else:
        raise CurveError(f"unknown curve format {fmt!r}")
    arr = np.asarray(pts, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise CurveError("curve file must hold (x, y) pairs")
    return PolygonalCurve.from_points(arr)


def load_curve(path: str | Path) -> PolygonalCurve:
    path = Path(path)
    fmt = "csv" if path.suffix.lower() == ".csv" else None
    return parse_curve(path.read_text(encoding="utf-8"), fmt)


def dump_curve(curve: PolygonalCurve, fmt: str = "json") -> str:
    pts = curve.vertices.tolist()
    if fmt == "json":
        return json.dumps(pts)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y"])
    w.writerows(pts)
    return buf.getvalue()
