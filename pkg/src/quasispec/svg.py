"""Deterministic SVG 1.1 export of curves and meshes."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .geometry import PolygonalCurve, TriMesh

MARGIN = 0.05
POSITIVE_FILL = "#d6604d"
NEGATIVE_FILL = "#4393c3"


def fmt(x: float) -> str:
    """9 significant digits, no trailing noise, no negative zero."""
    s = f"{float(x):.9g}"
    return "0" if s == "-0" else s


def _viewbox(points: np.ndarray) -> tuple[float, float, float, float]:
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    span = hi - lo
    pad = MARGIN * max(float(span.max()), 1e-12)
    return lo[0] - pad, lo[1] - pad, span[0] + 2 * pad, span[1] + 2 * pad


def _header(points: np.ndarray) -> tuple[list[str], float]:
    x, y, w, h = _viewbox(points)
    # flip y so the picture has the usual orientation
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{fmt(x)} {fmt(-(y + h))} {fmt(w)} {fmt(h)}">',
    ]
    return lines, max(w, h) / 800.0


def _pts(points: np.ndarray) -> str:
    return " ".join(f"{fmt(px)},{fmt(-py)}" for px, py in points)


def render_svg(obj, vector: np.ndarray | None = None) -> str:
    """SVG text for a ``PolygonalCurve`` or a ``TriMesh``.

    With ``vector`` (one value per mesh node) triangles are filled by the
    sign of the vertex mean, giving the nodal pattern of an eigenvector.
    """
    if isinstance(obj, PolygonalCurve):
        v = np.asarray(obj.vertices)
        lines, stroke = _header(v)
        lines.append(f'<polygon points="{_pts(v)}" fill="none" stroke="black" '
                     f'stroke-width="{fmt(stroke)}"/>')
    elif isinstance(obj, TriMesh):
        v = np.asarray(obj.nodes)
        lines, stroke = _header(v)
        tri = np.asarray(obj.triangles)
        signs = None
        if vector is not None:
            vector = np.asarray(vector, dtype=float)
            if vector.shape != (len(v),):
                raise ValueError("vector needs one value per mesh node")
            signs = vector[tri].mean(axis=1) >= 0
        lines.append(f'<g stroke="black" stroke-width="{fmt(stroke / 4)}">')
        for i, t in enumerate(tri):
            fill = "none" if signs is None else (POSITIVE_FILL if signs[i] else NEGATIVE_FILL)
            lines.append(f'<polygon points="{_pts(v[t])}" fill="{fill}"/>')
        lines.append("</g>")
    else:
        raise TypeError(f"cannot render {type(obj).__name__}")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export_svg(obj, path: str | Path, vector: np.ndarray | None = None) -> None:
    Path(path).write_bytes(render_svg(obj, vector).encode("utf-8"))
