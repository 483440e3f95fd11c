"""Triangulation of simple polygons for the P1 finite-element solver.

Ear clipping produces an exact cover of the polygon; longest-edge
bisection then refines it.  Bisecting the globally longest edge first
keeps the mesh conforming: that edge is the longest edge of both
triangles sharing it, so both are split at the same midpoint.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .curves import PolygonalCurve, is_simple, polygon_area, polygon_diameter

DEFAULT_NODE_CAP = 2_000_000


class MeshError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class TriMesh:
    nodes: np.ndarray        # (N, 2)
    triangles: np.ndarray    # (T, 3) int, counter-clockwise
    boundary: np.ndarray     # (N,) bool

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        tris = np.asarray(self.triangles, dtype=np.int64)
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise MeshError("triangles must be an (T, 3) index array")
        if tris.size and (tris.min() < 0 or tris.max() >= len(nodes)):
            raise MeshError("triangle index out of range")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "boundary", np.asarray(self.boundary, dtype=bool))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def area(self) -> float:
        return float(self.signed_areas().sum())

    def edges(self) -> np.ndarray:
        """Unique undirected edges as sorted index pairs."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def max_edge_length(self) -> float:
        e = self.edges()
        d = self.nodes[e[:, 0]] - self.nodes[e[:, 1]]
        return float(np.hypot(d[:, 0], d[:, 1]).max())

    def check(self, domain_area: float | None = None) -> None:
        """Assert orientation, non-degeneracy and conformity."""
        areas = self.signed_areas()
        ref = domain_area if domain_area is not None else float(areas.sum())
        bad = np.flatnonzero(areas <= 1e-14 * ref)
        if bad.size:
            raise MeshError(f"triangle {int(bad[0])} is degenerate or clockwise")
        t = self.triangles
        directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        if len(np.unique(directed, axis=0)) != len(directed):
            raise MeshError("directed edge used twice (overlapping triangles)")
        _, counts = np.unique(np.sort(directed, axis=1), axis=0, return_counts=True)
        if counts.max() > 2:
            raise MeshError("edge shared by more than two triangles")

    def boundary_edges(self) -> np.ndarray:
        t = self.triangles
        e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        uniq, counts = np.unique(e, axis=0, return_counts=True)
        return uniq[counts == 1]


def _ear_clip(v: np.ndarray) -> list[tuple[int, int, int]]:
    n = len(v)
    prev = np.roll(np.arange(n), 1)
    nxt = np.roll(np.arange(n), -1)
    active = np.ones(n, dtype=bool)
    scale = float(np.ptp(v, axis=0).max()) ** 2
    eps = 1e-13 * scale

    def cross(i, j, k):
        return (v[j, 0] - v[i, 0]) * (v[k, 1] - v[i, 1]) - (v[j, 1] - v[i, 1]) * (v[k, 0] - v[i, 0])

    def quality(i) -> float:
        # smallest angle of the candidate ear, or -inf if it is not an ear
        p, q = prev[i], nxt[i]
        if cross(p, i, q) <= eps:
            return -np.inf
        others = active.copy()
        others[[p, i, q]] = False
        pts = v[others]
        if len(pts):
            a, b, c = v[p], v[i], v[q]
            d1 = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
            d2 = (c[0] - b[0]) * (pts[:, 1] - b[1]) - (c[1] - b[1]) * (pts[:, 0] - b[0])
            d3 = (a[0] - c[0]) * (pts[:, 1] - c[1]) - (a[1] - c[1]) * (pts[:, 0] - c[0])
            if np.any((d1 >= -eps) & (d2 >= -eps) & (d3 >= -eps)):
                return -np.inf
        tri = v[[p, i, q]]
        e = np.roll(tri, -1, axis=0) - tri
        lens = np.hypot(e[:, 0], e[:, 1])
        ang = []
        for k in range(3):
            u, w = -e[k - 1], e[k]
            ang.append(np.arctan2(abs(u[0] * w[1] - u[1] * w[0]), u @ w))
        return float(min(ang)) if lens.min() > 0 else -np.inf

    q = np.array([quality(i) for i in range(n)])
    tris = []
    remaining = n
    while remaining > 3:
        i = int(np.argmax(q))
        if q[i] == -np.inf:
            raise MeshError("ear clipping found no ear; is the polygon simple?")
        p, s = prev[i], nxt[i]
        tris.append((int(p), i, int(s)))
        active[i] = False
        q[i] = -np.inf
        nxt[p], prev[s] = s, p
        remaining -= 1
        q[p] = quality(p)
        q[s] = quality(s)
    i = int(np.flatnonzero(active)[0])
    tris.append((int(prev[i]), i, int(nxt[i])))
    return tris


def _refine(nodes: list, tris: list, boundary: list, h: float, node_cap: int):
    h2 = h * h
    alive = [True] * len(tris)
    emap: dict[tuple[int, int], list[int]] = {}
    heap = []

    def length2(a, b):
        (ax, ay), (bx, by) = nodes[a], nodes[b]
        return (ax - bx) ** 2 + (ay - by) ** 2

    def add_edge(a, b, t):
        key = (a, b) if a < b else (b, a)
        lst = emap.get(key)
        if lst is None:
            emap[key] = [t]
            heapq.heappush(heap, (-length2(a, b), key))
        else:
            lst.append(t)

    def drop_edge(a, b, t):
        key = (a, b) if a < b else (b, a)
        lst = emap[key]
        lst.remove(t)
        if not lst:
            del emap[key]

    for t, (a, b, c) in enumerate(tris):
        add_edge(a, b, t)
        add_edge(b, c, t)
        add_edge(c, a, t)

    while heap:
        neg, key = heap[0]
        if -neg <= h2:
            break
        heapq.heappop(heap)
        owners = emap.get(key)
        if owners is None:
            continue
        if len(nodes) >= node_cap:
            raise MeshError(f"refinement exceeded the node cap {node_cap}")
        a, b = key
        (ax, ay), (bx, by) = nodes[a], nodes[b]
        m = len(nodes)
        nodes.append((0.5 * (ax + bx), 0.5 * (ay + by)))
        boundary.append(len(owners) == 1)
        for t in list(owners):
            x, y, z = tris[t]
            # rotate so that the split edge is (x, y)
            if {x, y} != {a, b}:
                x, y, z = (y, z, x) if {y, z} == {a, b} else (z, x, y)
            drop_edge(x, y, t)
            drop_edge(y, z, t)
            drop_edge(z, x, t)
            alive[t] = False
            for tri in ((x, m, z), (m, y, z)):
                tris.append(tri)
                alive.append(True)
                k = len(tris) - 1
                add_edge(tri[0], tri[1], k)
                add_edge(tri[1], tri[2], k)
                add_edge(tri[2], tri[0], k)
    return [t for t, ok in zip(tris, alive) if ok]


def triangulate(curve: PolygonalCurve, h_target: float, node_cap: int = DEFAULT_NODE_CAP) -> TriMesh:
    """Ear-clip ``curve`` and bisect longest edges until all are <= h_target."""
    if not 0 < h_target < polygon_diameter(curve):
        raise MeshError("h_target must lie in (0, diameter)")
    if not is_simple(curve):
        raise MeshError("cannot triangulate a non-simple curve")
    v = curve.vertices
    tris = _ear_clip(v)
    nodes = [tuple(p) for p in v.tolist()]
    boundary = [True] * len(nodes)
    tris = _refine(nodes, tris, boundary, h_target, node_cap)
    mesh = TriMesh(np.array(nodes), np.array(tris, dtype=np.int64), np.array(boundary))
    mesh.check(polygon_area(curve))
    return mesh
