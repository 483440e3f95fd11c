"""Conformal capacity of planar condensers on tensor-product grids.

The discrete Dirichlet energy is the 5-point (finite-volume) form

    E(u) = sum over grid edges  w_e (u_a - u_b)^2,

with w = (dual cell width) / (edge length), which is 1 on a uniform grid.
The capacity is the minimum of E with u = 0 on plate 0 and u = 1 on plate 1;
the minimizer solves the discrete Laplace system on the free nodes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import log, pi

import numpy as np
import scipy.sparse as sp

from ._linalg import pcg
from .logreal import LogReal

DEFAULT_TOL = 1e-8
MIN_MC_SAMPLES = 100_000
DOUBLING_SEED = 0x5EED_D0B1_1A7E_0001
# ln of pi^2 (2 + pi^4)^2 / (2 ln 3); the doubling bound is exp(K * that)
LN_DOUBLING_BASE = log(pi**2 * (2 + pi**4) ** 2 / (2 * log(3.0)))


class CapacityError(RuntimeError):
    """Raised with ``code`` NO_ADMISSIBLE, NON_CONVERGED or PRECONDITION."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


# ---------------------------------------------------------------------------
# grids

@dataclass(frozen=True, eq=False)
class TensorGrid:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        for name in ("xs", "ys"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.ndim != 1 or len(a) < 2 or np.any(np.diff(a) <= 0):
                raise ValueError(f"{name} must be strictly increasing with >= 2 entries")
            object.__setattr__(self, name, a)

    @classmethod
    def uniform(cls, x0: float, x1: float, y0: float, y1: float, spacing: float) -> "TensorGrid":
        """Lattice with the given spacing, anchored so that 0 is a node when inside."""
        def axis(a, b):
            i0, i1 = int(np.floor(a / spacing)), int(np.ceil(b / spacing))
            return np.arange(i0, i1 + 1) * spacing
        return cls(axis(x0, x1), axis(y0, y1))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.xs), len(self.ys)

    @property
    def min_spacing(self) -> float:
        return float(min(np.diff(self.xs).min(), np.diff(self.ys).min()))

    def mesh(self):
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    def to_json(self) -> dict:
        return {
            "nx": len(self.xs), "ny": len(self.ys),
            "x_range": [float(self.xs[0]), float(self.xs[-1])],
            "y_range": [float(self.ys[0]), float(self.ys[-1])],
            "min_spacing": self.min_spacing,
        }


def graded_axis(lo: float, hi: float, specials, h_min: float, growth: float = 0.15,
                h_max: float | None = None) -> np.ndarray:
    """Axis through every special point, spacing h_min there and growing
    by ``growth`` times the distance to the nearest special point."""
    pts = sorted({float(lo), float(hi), *[float(s) for s in specials if lo <= s <= hi]})
    sp_ = np.array([s for s in specials if lo <= s <= hi], dtype=float)
    h_max = h_max or (hi - lo) / 8.0

    def size(x):
        d = np.abs(sp_ - x).min() if sp_.size else np.inf
        return min(h_max, h_min + growth * d)

    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        seg = [a]
        x = a
        while True:
            # the step shrinks again near b because b is a special point
            x = x + size(x)
            seg.append(x)
            if x >= b - 0.5 * size(b):
                break
        seg = np.array(seg)
        # stretch the march so its last step ends exactly at b
        seg = a + (seg - a) * (b - a) / (seg[-1] - a)
        seg[-1] = b
        out.extend(seg[1:].tolist())
    return np.array(out)


# ---------------------------------------------------------------------------
# problems and solver

@dataclass(eq=False)
class CondenserProblem:
    grid: TensorGrid
    plate0: np.ndarray      # (nx, ny) bool, u = 0
    plate1: np.ndarray      # (nx, ny) bool, u = 1
    domain: np.ndarray | None = None
    label: str = "custom"

    def __post_init__(self):
        shape = self.grid.shape
        self.plate0 = np.asarray(self.plate0, dtype=bool)
        self.plate1 = np.asarray(self.plate1, dtype=bool)
        self.domain = np.ones(shape, dtype=bool) if self.domain is None else np.asarray(self.domain, dtype=bool)
        for m in (self.plate0, self.plate1, self.domain):
            if m.shape != shape:
                raise ValueError(f"mask shape {m.shape} does not match grid {shape}")


@dataclass
class CapacityResult:
    value: float
    iterations: int
    residual: float
    grid_spacing: float
    nodes: int = 0
    label: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "value": self.value,
            "iterations": self.iterations,
            "residual": self.residual,
            "grid_spacing": self.grid_spacing,
            "nodes": self.nodes,
        }
        out.update(self.extra)
        return out


def _edges(grid: TensorGrid, domain: np.ndarray):
    """Index pairs and weights of all grid edges inside the domain."""
    nx, ny = grid.shape
    dx, dy = np.diff(grid.xs), np.diff(grid.ys)
    # dual widths: half the sum of adjacent spacings
    cx = np.zeros(nx)
    cx[:-1] += 0.5 * dx
    cx[1:] += 0.5 * dx
    cy = np.zeros(ny)
    cy[:-1] += 0.5 * dy
    cy[1:] += 0.5 * dy
    ids = np.arange(nx * ny).reshape(nx, ny)
    hx = domain[:-1, :] & domain[1:, :]
    wx = (cy[None, :] / dx[:, None]) * np.ones((nx - 1, ny))
    vy = domain[:, :-1] & domain[:, 1:]
    wy = (cx[:, None] / dy[None, :]) * np.ones((nx, ny - 1))
    a = np.concatenate([ids[:-1, :][hx], ids[:, :-1][vy]])
    b = np.concatenate([ids[1:, :][hx], ids[:, 1:][vy]])
    w = np.concatenate([wx[hx], wy[vy]])
    return a, b, w


def solve_capacity(problem: CondenserProblem, tol: float = DEFAULT_TOL,
                   maxiter: int | None = None) -> CapacityResult:
    """Minimal discrete Dirichlet energy with the plates clamped to 0 and 1."""
    g = problem.grid
    dom = problem.domain
    p0, p1 = problem.plate0 & dom, problem.plate1 & dom
    if not p0.any() or not p1.any():
        raise CapacityError("NO_ADMISSIBLE", "a plate has no grid nodes in the domain")
    if (p0 & p1).any():
        raise CapacityError("NO_ADMISSIBLE", "plates overlap")
    a, b, w = _edges(g, dom)
    f0, f1 = p0.ravel(), p1.ravel()
    if np.any((f0[a] & f1[b]) | (f1[a] & f0[b])):
        raise CapacityError("NO_ADMISSIBLE", "plates touch (a grid edge joins them)")
    n = f0.size
    L = sp.coo_matrix((np.concatenate([w, w, -w, -w]),
                       (np.concatenate([a, b, a, b]), np.concatenate([a, b, b, a]))),
                      shape=(n, n)).tocsr()
    free = (dom.ravel() & ~f0 & ~f1)
    fi = np.flatnonzero(free)
    u = f1.astype(float)
    it, res = 0, 0.0
    if fi.size:
        Lff = L[fi][:, fi].tocsr()
        rhs = -(L[fi] @ u)
        diag = Lff.diagonal()
        isolated = diag == 0
        if isolated.any():
            # nodes with no edges carry no energy; pin them
            diag = np.where(isolated, 1.0, diag)
            Lff = Lff + sp.diags(isolated.astype(float))
        x, it, res = pcg(Lff, rhs, diag, tol=tol, maxiter=maxiter or 100 * int(np.sqrt(n)) + 5000)
        if res > tol:
            raise CapacityError("NON_CONVERGED", f"relative residual {res:.3e} after {it} iterations")
        u[fi] = x
    energy = float(w @ (u[a] - u[b]) ** 2)
    return CapacityResult(energy, it, float(res), g.min_spacing, int(dom.sum()), problem.label)


# ---------------------------------------------------------------------------
# presets

def annulus_problem(r: float, R: float, spacing: float = 1 / 128, center=(0.0, 0.0)) -> CondenserProblem:
    """Plate 0 = closed disc of radius r, plate 1 = complement of the disc of radius R."""
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    cx, cy = center
    pad = 2 * spacing
    g = TensorGrid.uniform(cx - R - pad, cx + R + pad, cy - R - pad, cy + R + pad, spacing)
    X, Y = g.mesh()
    rr = np.hypot(X - cx, Y - cy)
    return CondenserProblem(g, rr <= r, rr >= R, label=f"annulus r={r} R={R}")


def annulus_capacity(r: float, R: float, spacing: float = 1 / 128, center=(0.0, 0.0),
                     tol: float = DEFAULT_TOL) -> CapacityResult:
    res = solve_capacity(annulus_problem(r, R, spacing, center), tol)
    res.extra["exact"] = 2 * pi / log(R / r)
    return res


def teichmuller_problem(t: float, spacing: float = 1 / 128, far: float = 64.0,
                        box: float = 128.0, growth: float = 0.15) -> CondenserProblem:
    """Plates [-1, 0] and [t, far * t] on the real axis inside a box of half-width box * t.

    The axes are graded: spacing ``spacing`` at the segment endpoints,
    growing geometrically away from them.
    """
    if t <= 1:
        raise ValueError("t must exceed 1")
    half = box * t
    t_far = far * t
    xs = graded_axis(-half, half, [-1.0, 0.0, t, t_far], spacing, growth)
    ys = graded_axis(-half, half, [0.0], spacing, growth)
    g = TensorGrid(xs, ys)
    X, Y = g.mesh()
    on_axis = np.isclose(Y, 0.0, atol=1e-12)
    p0 = on_axis & (X >= -1.0 - 1e-12) & (X <= 1e-12)
    p1 = on_axis & (X >= t - 1e-12) & (X <= t_far + 1e-12)
    return CondenserProblem(g, p0, p1, label=f"teichmuller t={t}")


def teichmuller_bracket(t: float) -> tuple[float, float]:
    """(2 pi / ln(32 t), 2 pi / ln(t + 1)]: open below, closed above."""
    return 2 * pi / log(32 * t), 2 * pi / log(t + 1)


def teichmuller_capacity(t: float, spacing: float = 1 / 128, tol: float = DEFAULT_TOL,
                         **kw) -> CapacityResult:
    res = solve_capacity(teichmuller_problem(t, spacing, **kw), tol)
    lo, hi = teichmuller_bracket(t)
    res.extra.update({"bracket": [lo, hi], "in_bracket": bool(lo < res.value <= hi)})
    return res


# ---------------------------------------------------------------------------
# two continua crossing an annulus

def rasterize_path(grid: TensorGrid, points) -> np.ndarray:
    """Mask of grid nodes along a polyline, 4-connected.

    Each path sample snaps to its nearest node; consecutive nodes are joined
    by axis-aligned steps so the discrete continuum has no diagonal gaps.
    """
    pts = np.asarray(points, dtype=float)
    mask = np.zeros(grid.shape, dtype=bool)

    def nearest(axis, v):
        i = np.clip(np.searchsorted(axis, v), 1, len(axis) - 1)
        return np.where(np.abs(axis[i - 1] - v) <= np.abs(axis[i] - v), i - 1, i)

    # resample finely so no step skips more than one node
    seg = np.diff(pts, axis=0)
    h = grid.min_spacing
    dense = [pts[:1]]
    for p, d in zip(pts[:-1], seg):
        k = max(1, int(np.ceil(np.hypot(*d) / (0.25 * h))))
        dense.append(p + np.outer(np.arange(1, k + 1) / k, d))
    dense = np.vstack(dense)
    ii, jj = nearest(grid.xs, dense[:, 0]), nearest(grid.ys, dense[:, 1])
    ci, cj = int(ii[0]), int(jj[0])
    mask[ci, cj] = True
    for i, j in zip(ii[1:], jj[1:]):
        while (ci, cj) != (i, j):
            if ci != i:
                ci += 1 if i > ci else -1
            else:
                cj += 1 if j > cj else -1
            mask[ci, cj] = True
    return mask


def radial_segment(angle: float, r: float, R: float, n: int = 2) -> np.ndarray:
    rho = np.linspace(r, R, n)
    return np.column_stack([rho * np.cos(angle), rho * np.sin(angle)])


def log_spiral(r: float, R: float, turns: float = 0.5, phase: float = 0.0, n: int = 400) -> np.ndarray:
    """theta = phase + 2 pi turns ln(rho / r) / ln(R / r), rho from r to R."""
    rho = np.linspace(r, R, n)
    th = phase + 2 * pi * turns * np.log(rho / r) / log(R / r)
    return np.column_stack([rho * np.cos(th), rho * np.sin(th)])


def radial_continua_lower_bound(r: float, R: float) -> float:
    return 2.0 / pi * log(R / r)


def annular_lower_bound_check(r: float, R: float, f0_path, f1_path, spacing: float = 1 / 64,
                              grid_rtol: float = 0.02, tol: float = DEFAULT_TOL):
    """Capacity of (F0, F1) in the annulus r < |z| < R against (2/pi) ln(R/r).

    Returns ``(ok, value, bound)`` where ok allows a relative grid tolerance.
    """
    if not 0 < r < R:
        raise CapacityError("PRECONDITION", "need 0 < r < R")
    for name, path in (("F0", f0_path), ("F1", f1_path)):
        rad = np.hypot(*np.asarray(path, dtype=float).T)
        if rad.min() > r + 1e-12 or rad.max() < R - 1e-12:
            raise CapacityError("PRECONDITION", f"{name} does not cross every circle between r and R")
    pad = 2 * spacing
    g = TensorGrid.uniform(-R - pad, R + pad, -R - pad, R + pad, spacing)
    X, Y = g.mesh()
    rr = np.hypot(X, Y)
    # keep the node layer just outside each circle so plates reach both circles
    dom = (rr >= r - spacing) & (rr <= R + spacing)
    p0 = rasterize_path(g, f0_path) & dom
    p1 = rasterize_path(g, f1_path) & dom
    res = solve_capacity(CondenserProblem(g, p0, p1 & ~p0, dom, label="annular continua"), tol)
    bound = radial_continua_lower_bound(r, R)
    return bool(res.value >= bound * (1.0 - grid_rtol)), res.value, bound


# ---------------------------------------------------------------------------
# doubling ratio of a radial stretch

class QcMapKind(enum.Enum):
    RADIAL_STRETCH = "radial_stretch"


@dataclass(frozen=True)
class QcTestMap:
    kind: QcMapKind
    k: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("K must be >= 1")

    @classmethod
    def radial_stretch(cls, k: float) -> "QcTestMap":
        return cls(QcMapKind.RADIAL_STRETCH, float(k))

    def forward(self, z):
        z = np.asarray(z, dtype=complex)
        a = np.abs(z)
        return np.where(a > 0, z * np.where(a > 0, a, 1.0) ** (1.0 / self.k - 1.0), 0)

    def inverse(self, w):
        w = np.asarray(w, dtype=complex)
        a = np.abs(w)
        return w * a ** (self.k - 1.0)


def doubling_bound(k: float) -> LogReal:
    """exp{K pi^2 (2 + pi^4)^2 / (2 ln 3)} in log space."""
    return LogReal(k * np.exp(LN_DOUBLING_BASE))


@dataclass
class DoublingResult:
    ratio: float
    bound: LogReal
    samples: int
    seed: int
    hits_small: int
    hits_large: int

    @property
    def holds(self) -> bool:
        return LogReal.from_float(self.ratio) <= self.bound

    def to_json(self) -> dict:
        return {
            "ratio": self.ratio,
            "bound": self.bound.to_json(),
            "holds": self.holds,
            "samples": self.samples,
            "seed": self.seed,
            "hits_small": self.hits_small,
            "hits_large": self.hits_large,
        }


def doubling_ratio(fmap: QcTestMap, z0: complex = 0.0, r: float = 1.0,
                   resolution: int = 1_000_000, seed: int = DOUBLING_SEED,
                   chunk: int = 250_000) -> DoublingResult:
    """|f(D(z0, 2r))| / |f(D(z0, r))| by hit-or-miss sampling of the image box."""
    if resolution < MIN_MC_SAMPLES:
        raise ValueError(f"resolution must be at least {MIN_MC_SAMPLES} samples")
    if r <= 0:
        raise ValueError("r must be positive")
    z0 = complex(z0)
    ring = z0 + 2 * r * np.exp(2j * pi * np.arange(4096) / 4096)
    img = fmap.forward(ring)
    xs, ys = img.real, img.imag
    if abs(z0) < 2 * r:
        xs, ys = np.append(xs, 0.0), np.append(ys, 0.0)
    pad = 0.01 * max(np.ptp(xs), np.ptp(ys))
    x0, x1 = xs.min() - pad, xs.max() + pad
    y0, y1 = ys.min() - pad, ys.max() + pad
    rng = np.random.default_rng(seed)
    small = large = 0
    done = 0
    while done < resolution:
        m = min(chunk, resolution - done)
        w = rng.uniform(x0, x1, m) + 1j * rng.uniform(y0, y1, m)
        d = np.abs(fmap.inverse(w) - z0)
        small += int(np.count_nonzero(d < r))
        large += int(np.count_nonzero(d < 2 * r))
        done += m
    if small == 0:
        raise ValueError("no samples landed in the small image; raise the resolution")
    return DoublingResult(large / small, doubling_bound(fmap.k), resolution, seed, small, large)
