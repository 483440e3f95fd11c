"""Closed planar polylines and the predicates used on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class CurveError(ValueError):
    """A vertex list that violates a curve invariant."""


def signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True, eq=False)
class PolygonalCurve:
    """Closed polyline, implicitly closed, counter-clockwise.

    Simplicity is not checked on construction (it is quadratic in the
    vertex count); call :func:`is_simple` or :meth:`require_simple` where
    it matters.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise CurveError(f"expected an (n, 2) vertex array, got shape {v.shape}")
        if len(v) < 3:
            raise CurveError("a closed curve needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise CurveError("vertex coordinates must be finite")
        if signed_area(v) <= 0:
            raise CurveError("vertices must be ordered counter-clockwise (positive area)")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_points(cls, points, orient: bool = True) -> "PolygonalCurve":
        """Build a curve, reversing clockwise input when ``orient`` is set.

        A repeated closing vertex (last == first) is dropped.
        """
        v = np.asarray(points, dtype=float)
        if len(v) > 3 and np.array_equal(v[0], v[-1]):
            v = v[:-1]
        if orient and len(v) >= 3 and signed_area(v) < 0:
            v = v[::-1]
        return cls(v)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def edge_lengths(self) -> np.ndarray:
        a, b = self.edges
        return np.hypot(*(b - a).T)

    def perimeter(self) -> float:
        return float(self.edge_lengths().sum())

    def transformed(self, scale: float = 1.0, angle: float = 0.0, shift=(0.0, 0.0)) -> "PolygonalCurve":
        """Similarity image ``scale * R(angle) z + shift``."""
        c, s = np.cos(angle), np.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        return PolygonalCurve(scale * self.vertices @ rot.T + np.asarray(shift, dtype=float))

    def require_simple(self) -> None:
        if not is_simple(self):
            raise CurveError("curve is not simple (two non-adjacent edges intersect)")


def polygon_area(curve: PolygonalCurve) -> float:
    """Shoelace area."""
    return signed_area(curve.vertices)


def polygon_diameter(curve: PolygonalCurve) -> float:
    """Largest vertex-to-vertex distance, which is exact for polygons."""
    v = curve.vertices
    if len(v) > 64:
        from scipy.spatial import ConvexHull

        v = v[ConvexHull(v).vertices]
    best = 0.0
    for start in range(0, len(v), 512):
        block = v[start:start + 512]
        d = np.hypot(block[:, None, 0] - v[None, :, 0], block[:, None, 1] - v[None, :, 1])
        best = max(best, float(d.max()))
    return best


def is_convex(curve: PolygonalCurve, rtol: float = 1e-9) -> bool:
    """True when no turn goes clockwise beyond ``rtol`` (relative to edge lengths)."""
    v = curve.vertices
    a = v - np.roll(v, 1, axis=0)
    b = np.roll(v, -1, axis=0) - v
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    scale = np.hypot(*a.T) * np.hypot(*b.T)
    return bool(np.all(cross >= -rtol * scale))


def regular_polygon(n: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> PolygonalCurve:
    t = phase + 2.0 * np.pi * np.arange(n) / n
    return PolygonalCurve(np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)]))


def rectangle(width: float = 1.0, height: float = 1.0, origin=(0.0, 0.0)) -> PolygonalCurve:
    x0, y0 = origin
    return PolygonalCurve(np.array([[x0, y0], [x0 + width, y0], [x0 + width, y0 + height], [x0, y0 + height]]))


def densify(curve: PolygonalCurve, per_edge: int) -> PolygonalCurve:
    """Insert ``per_edge - 1`` equally spaced points on every edge."""
    a, b = curve.edges
    t = np.arange(per_edge) / per_edge
    pts = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
    return PolygonalCurve(pts.reshape(-1, 2))


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _segments_intersect(p1, p2, q1, q2) -> np.ndarray:
    """Closed-segment intersection test, broadcasting over leading axes."""
    d1 = _orient(q1[..., 0], q1[..., 1], q2[..., 0], q2[..., 1], p1[..., 0], p1[..., 1])
    d2 = _orient(q1[..., 0], q1[..., 1], q2[..., 0], q2[..., 1], p2[..., 0], p2[..., 1])
    d3 = _orient(p1[..., 0], p1[..., 1], p2[..., 0], p2[..., 1], q1[..., 0], q1[..., 1])
    d4 = _orient(p1[..., 0], p1[..., 1], p2[..., 0], p2[..., 1], q2[..., 0], q2[..., 1])
    proper = (((d1 > 0) & (d2 < 0)) | ((d1 < 0) & (d2 > 0))) & (((d3 > 0) & (d4 < 0)) | ((d3 < 0) & (d4 > 0)))

    def on_seg(a, b, c, d):
        # c collinear with a-b and inside its bounding box
        return (d == 0) & (np.minimum(a[..., 0], b[..., 0]) <= c[..., 0]) & (c[..., 0] <= np.maximum(a[..., 0], b[..., 0])) \
            & (np.minimum(a[..., 1], b[..., 1]) <= c[..., 1]) & (c[..., 1] <= np.maximum(a[..., 1], b[..., 1]))

    touching = on_seg(q1, q2, p1, d1) | on_seg(q1, q2, p2, d2) | on_seg(p1, p2, q1, d3) | on_seg(p1, p2, q2, d4)
    return proper | touching


def is_simple(curve: PolygonalCurve) -> bool:
    """True iff no two non-adjacent edges intersect (O(n^2) sweep)."""
    a, b = curve.edges
    n = len(a)
    if n == 3:
        return True
    idx = np.arange(n)
    block = max(1, 2_000_000 // n)
    for start in range(0, n, block):
        i = idx[start:start + block]
        hit = _segments_intersect(a[i, None, :], b[i, None, :], a[None, :, :], b[None, :, :])
        gap = (idx[None, :] - i[:, None]) % n
        hit &= (gap > 1) & (gap < n - 1)
        if hit.any():
            return False
    return True


def points_in_polygon(curve: PolygonalCurve, points, boundary_tol: float = 1e-12) -> np.ndarray:
    """Crossing-number test for many points; points on the boundary count as inside."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a, b = curve.edges
    scale = max(1.0, float(np.abs(curve.vertices).max()))
    tol = boundary_tol * scale
    out = np.empty(len(pts), dtype=bool)
    block = max(1, 4_000_000 // len(a))
    for start in range(0, len(pts), block):
        p = pts[start:start + block, None, :]
        ax, ay, bx, by = a[None, :, 0], a[None, :, 1], b[None, :, 0], b[None, :, 1]
        px, py = p[..., 0], p[..., 1]
        straddle = (ay > py) != (by > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = ax + (py - ay) * (bx - ax) / (by - ay)
        crossings = np.count_nonzero(straddle & (px < x_cross), axis=1)
        # distance to each segment for the boundary rule
        ex, ey = bx - ax, by - ay
        len2 = ex * ex + ey * ey
        t = np.clip(((px - ax) * ex + (py - ay) * ey) / len2, 0.0, 1.0)
        dist = np.hypot(ax + t * ex - px, ay + t * ey - py)
        on_edge = (dist <= tol).any(axis=1)
        out[start:start + block] = (crossings % 2 == 1) | on_edge
    return out


def point_in_polygon(curve: PolygonalCurve, pt) -> bool:
    return bool(points_in_polygon(curve, [pt])[0])
