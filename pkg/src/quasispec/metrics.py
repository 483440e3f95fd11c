"""Bounded-turning (Ahlfors) constants of polygons and quasiconformality bounds.

For a pair of vertices (x, y) the curve splits into two arcs.  The
bounded-turning ratio of the pair is diam(smaller-diameter arc) / |x - y|;
the three-point ratio is max |z - x| / |y - x| over vertices z of that arc.

Arc quantities for every start vertex are built by expanding the arc length
one vertex at a time (O(n) vector work per length, O(n^2) total):

    diam(i, L)  = max(diam(i, L-1), diam(i+1, L-1), |v_i - v_{i+L}|)
    far_i(i, L) = max(far_i(i, L-1), |v_i - v_{i+L}|)
    far_j(i, L) = max(far_j(i+1, L-1), |v_i - v_{i+L}|)

where far_i / far_j are the largest distances from the first / last vertex.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, cos, exp, log, pi, sin

import numpy as np

from .conformal import ConformalMapSpec, MapKind
from .geometry import CurveError, PolygonalCurve
from .logreal import LogReal, logaddexp

EXHAUSTIVE_LIMIT = 1500
# stored arc columns (n * n / stride floats per table) are capped at this size
_TABLE_LIMIT = 2.5e7
_TIE_RTOL = 1e-12


class Method(enum.Enum):
    BOUNDED_TURNING = "bt"
    THREE_POINT = "3pt"


class Provenance(enum.Enum):
    AHLFORS_C = "ahlfors_c"
    STAR_BETA = "star_beta"
    SPIRAL_BETA = "spiral_beta"
    M_CONDITION = "m_condition"
    DIRECT = "direct"


@dataclass(frozen=True)
class AhlforsEstimate:
    c_hat: float
    witness: tuple[int, int, int]
    method: Method
    vertex_count: int
    subsampled: bool
    stride: int = 1

    def to_json(self) -> dict:
        return {
            "c_hat": self.c_hat,
            "witness": list(self.witness),
            "method": self.method.value,
            "vertex_count": self.vertex_count,
            "subsampled": self.subsampled,
            "stride": self.stride,
        }


@dataclass(frozen=True)
class QcCoefficient:
    """A quasiconformality coefficient K >= 1 held in log space."""

    k: LogReal
    provenance: Provenance

    def __post_init__(self):
        if self.k < LogReal.one():
            raise ValueError("K must be >= 1")

    @property
    def ln_k(self) -> float:
        return self.k.log()

    def to_json(self) -> dict:
        return {"k": self.k.to_json(), "provenance": self.provenance.value}


def default_stride(n: int) -> int:
    if n <= EXHAUSTIVE_LIMIT:
        return 1
    return max(ceil(n / EXHAUSTIVE_LIMIT), ceil(n * n / _TABLE_LIMIT))


def _arc_tables(v: np.ndarray, idx: np.ndarray, need_far: bool):
    """Arc diameter (and far-point) tables at start vertices ``idx``.

    Row L holds arcs of L edges; row 0 is zero.
    """
    n = len(v)
    m = len(idx)
    diam = np.zeros((n, m))
    far_i = np.zeros((n, m)) if need_far else None
    far_j = np.zeros((n, m)) if need_far else None
    a = np.zeros(n)
    fi = np.zeros(n)
    fj = np.zeros(n)
    for L in range(1, n):
        w = np.roll(v, -L, axis=0)
        d = np.hypot(v[:, 0] - w[:, 0], v[:, 1] - w[:, 1])
        a = np.maximum(np.maximum(a, np.roll(a, -1)), d)
        diam[L] = a[idx]
        if need_far:
            fi = np.maximum(fi, d)
            fj = np.maximum(np.roll(fj, -1), d)
            far_i[L] = fi[idx]
            far_j[L] = fj[idx]
    return diam, far_i, far_j


def _estimate(curve: PolygonalCurve, stride: int | None, method: Method) -> AhlforsEstimate:
    v = np.asarray(curve.vertices, dtype=float)
    n = len(v)
    steps = np.hypot(*(np.roll(v, -1, axis=0) - v).T)
    if np.any(steps == 0):
        raise CurveError("coincident consecutive vertices")
    stride = default_stride(n) if stride is None else int(stride)
    if stride < 1:
        raise ValueError("stride must be >= 1")
    idx = np.arange(0, n, stride)
    pos = -np.ones(n, dtype=np.int64)
    pos[idx] = np.arange(len(idx))
    three = method is Method.THREE_POINT
    diam, far_i, far_j = _arc_tables(v, idx, three)

    best, arg = -np.inf, None
    for L in range(1, n):
        j = (idx + L) % n
        ok = pos[j] >= 0
        if not ok.any():
            continue
        ci, cj = np.arange(len(idx))[ok], pos[j[ok]]
        da = diam[L, ci]                  # arc i -> j, L edges
        db = diam[n - L, cj]              # arc j -> i, n - L edges
        chord = np.hypot(*(v[idx[ci]] - v[j[ok]]).T)
        tie = np.abs(da - db) <= _TIE_RTOL * np.maximum(da, db)
        use_a = np.where(tie, L <= n - L, da < db)
        if three:
            # from the pair's first point, then from its second
            fa = np.maximum(far_i[L, ci], far_j[L, ci])
            fb = np.maximum(far_j[n - L, cj], far_i[n - L, cj])
            val = np.where(use_a, fa, fb) / chord
        else:
            val = np.where(use_a, da, db) / chord
        k = int(np.argmax(val))
        if val[k] > best:
            best = float(val[k])
            arg = (int(idx[ci[k]]), int(j[ok][k]), bool(use_a[k]), L)
    i, j, use_a, L = arg
    arc = (np.arange(i, i + L + 1) if use_a else np.arange(j, j + n - L + 1)) % n
    di = np.hypot(*(v[arc] - v[i]).T)
    dj = np.hypot(*(v[arc] - v[j]).T)
    if three and dj.max() > di.max():
        i, j, di = j, i, dj
    k = int(arc[int(np.argmax(di))])
    return AhlforsEstimate(
        c_hat=best,
        witness=(i, k, j),
        method=method,
        vertex_count=n,
        subsampled=stride > 1,
        stride=stride,
    )


def estimate_bounded_turning(curve: PolygonalCurve, stride: int | None = None) -> AhlforsEstimate:
    """Max over vertex pairs of diam(smaller-diameter arc) / chord.

    ``stride`` samples the pairs (1 = exhaustive); arc diameters always use
    every vertex, so a strided value never exceeds the exhaustive one.
    """
    return _estimate(curve, stride, Method.BOUNDED_TURNING)


def estimate_three_point(curve: PolygonalCurve, stride: int | None = None) -> AhlforsEstimate:
    """Max of |z - x| / |y - x| with z on the smaller-diameter arc from x to y."""
    return _estimate(curve, stride, Method.THREE_POINT)


# ---------------------------------------------------------------------------
# coefficient chain

def turning_square(c: float) -> Fraction | float:
    """(1 + e^(2 pi) c^5)^2, exact from the rounded inner term when it fits a float.

    Returns a float (possibly ``inf``) once the square leaves float range.
    """
    if c < 1:
        raise ValueError("an Ahlfors constant is at least 1")
    ln_inner = logaddexp(0.0, 2 * pi + 5 * log(c))
    if ln_inner < 300:
        return Fraction(1.0 + exp(2 * pi) * c**5) ** 2
    return exp(2.0 * ln_inner) if ln_inner < 354 else float("inf")


def k_from_ahlfors(c: float) -> QcCoefficient:
    """K < 2^-10 exp{(1 + e^(2 pi) c^5)^2} for a bounded-turning constant c."""
    sq = turning_square(c)
    if isinstance(sq, Fraction):
        k = LogReal.from_ln(sq - 10 * Fraction(log(2.0)))
    else:
        ln_inner = logaddexp(0.0, 2 * pi + 5 * log(c))
        k = LogReal.exp_of(LogReal(2.0 * ln_inner)) / 2.0**10
    return QcCoefficient(k, Provenance.AHLFORS_C)


def m_from_k(k: float, log_space: bool = False) -> float:
    """Upper bound e^(pi k) / 16 on the M-condition constant."""
    if k < 1:
        raise ValueError("K must be >= 1")
    ln = pi * k - log(16.0)
    return ln if log_space else float(np.exp(ln))


def k_from_m(m: float, log_space: bool = False) -> float:
    """Upper bound m^2 on K for an M-condition constant m."""
    if m <= 0:
        raise ValueError("m must be positive")
    return 2.0 * log(m) if log_space else m * m


def k_star_shaped(beta: float) -> QcCoefficient:
    """K = cot^2((1 - beta) pi / 4) for a beta-star-shaped domain."""
    if not 0 <= beta < 1:
        raise ValueError("beta must lie in [0, 1)")
    x = (1.0 - beta) * pi / 4.0
    # ln cot x = ln cos x - ln sin x stays finite as x -> 0
    ln_k = 2.0 * (log(cos(x)) - log(sin(x)))
    return QcCoefficient(LogReal(max(ln_k, 0.0)), Provenance.STAR_BETA)


def k_direct(k: float) -> QcCoefficient:
    return QcCoefficient(LogReal.from_float(k), Provenance.DIRECT)


def estimate_beta(spec: ConformalMapSpec, grid: int = 256) -> float:
    """(2/pi) sup |arg(z phi'(z) / phi(z))| on a radial-angular grid of the closed disc.

    Radii are i / grid for i = 1..grid; points where the map blows up
    (the KOEBE pole at z = 1) are skipped.
    """
    if abs(spec.phi(0.0)) > 1e-15:
        raise ValueError("map must fix 0")
    r = np.arange(1, grid + 1) / grid
    t = 2 * pi * np.arange(grid) / grid
    z = (r[:, None] * np.exp(1j * t)[None, :]).ravel()
    if spec.kind is MapKind.KOEBE:
        z = z[np.abs(1.0 - z) > 1e-12]
    with np.errstate(divide="ignore", invalid="ignore"):
        q = z * spec.dphi(z) / spec.phi(z)
    q = q[np.isfinite(q)]
    return float(2.0 / pi * np.abs(np.angle(q)).max())


def beta_from_k(k: float) -> float:
    """Inverse of k_star_shaped on K >= 1."""
    return 1.0 - 4.0 / pi * np.arctan(1.0 / np.sqrt(k))
