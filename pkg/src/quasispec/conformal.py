"""Exact conformal maps of the unit disc and the hyperbolic alpha-dilatation.

Q(alpha) is the integral of |phi'|^alpha over the unit disc.  It is
integrated shell by shell on the annuli 1 - 2^-(k-1) <= |z| <= 1 - 2^-k, so
the quadrature can follow derivatives that blow up at the boundary.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import pi

import numpy as np

from .geometry import PolygonalCurve, triangulate

DEFAULT_SHELLS = 24
RADIAL_ORDER = 16
ANGULAR_PANELS = 16
ANGULAR_ORDER = 16
DIVERGENCE_RUN = 6
DIVERGENCE_SLACK = 1e-2
DIVERGENCE_GROWTH = 1e12


class MapKind(enum.Enum):
    IDENTITY = "identity"
    SCALE = "scale"
    QUADRATIC = "quadratic"
    KOEBE = "koebe"


@dataclass(frozen=True)
class ConformalMapSpec:
    kind: MapKind
    param: complex = 0.0

    def __post_init__(self):
        kind = MapKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is MapKind.SCALE and not (np.isreal(self.param) and np.real(self.param) > 0):
            raise ValueError("SCALE needs a positive real factor")
        if kind is MapKind.QUADRATIC and abs(self.param) > 0.5:
            raise ValueError("QUADRATIC(c) is univalent only for |c| <= 1/2")

    @classmethod
    def identity(cls):
        return cls(MapKind.IDENTITY)

    @classmethod
    def scale(cls, r: float):
        return cls(MapKind.SCALE, r)

    @classmethod
    def quadratic(cls, c: complex):
        return cls(MapKind.QUADRATIC, c)

    @classmethod
    def koebe(cls):
        return cls(MapKind.KOEBE)

    @classmethod
    def parse(cls, text: str) -> "ConformalMapSpec":
        """'identity', 'koebe', 'scale:2', 'quadratic:0.25'."""
        name, _, arg = text.partition(":")
        kind = MapKind(name.strip().lower())
        if kind in (MapKind.SCALE, MapKind.QUADRATIC):
            if not arg:
                raise ValueError(f"{kind.value} needs a parameter, e.g. {kind.value}:0.25")
            val = complex(arg.replace(" ", ""))
            return cls(kind, val.real if val.imag == 0 else val)
        return cls(kind)

    @property
    def label(self) -> str:
        if self.kind in (MapKind.SCALE, MapKind.QUADRATIC):
            return f"{self.kind.value}:{self.param}"
        return self.kind.value

    @property
    def bounded(self) -> bool:
        return self.kind is not MapKind.KOEBE

    def phi(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind is MapKind.IDENTITY:
            return z
        if self.kind is MapKind.SCALE:
            return self.param * z
        if self.kind is MapKind.QUADRATIC:
            return z + self.param * z * z
        return z / (1.0 - z) ** 2

    def dphi(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind is MapKind.IDENTITY:
            return np.ones_like(z)
        if self.kind is MapKind.SCALE:
            return np.full_like(z, self.param)
        if self.kind is MapKind.QUADRATIC:
            return 1.0 + 2.0 * self.param * z
        return (1.0 + z) / (1.0 - z) ** 3

    def inverse(self, w):
        """Closed-form inverse (not available for KOEBE)."""
        w = np.asarray(w, dtype=complex)
        if self.kind is MapKind.IDENTITY:
            return w
        if self.kind is MapKind.SCALE:
            return w / self.param
        if self.kind is MapKind.QUADRATIC:
            c = self.param
            if c == 0:
                return w
            # root of c z^2 + z - w with |z| < 1; this form avoids cancellation
            s = np.sqrt(1.0 + 4.0 * c * w)
            s = np.where(np.real(s) < 0, -s, s)
            return 2.0 * w / (1.0 + s)
        raise ValueError("KOEBE has an unbounded image; no inverse form")


def _check_disc(z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("points must lie in the open unit disc")
    return z


def eval_derivative(spec: ConformalMapSpec, z) -> complex | np.ndarray:
    z = _check_disc(z)
    d = spec.dphi(z)
    return complex(d) if d.ndim == 0 else d


def _require_normalized(spec: ConformalMapSpec) -> None:
    if abs(spec.phi(0.0)) > 1e-15 or abs(spec.dphi(0.0) - 1.0) > 1e-12:
        raise ValueError(f"{spec.label} is not normalized (phi(0) = 0, phi'(0) = 1)")


def koebe_distortion_check(spec: ConformalMapSpec, samples: int = 10_000, seed: int = 0,
                           tol: float = 1e-12) -> bool:
    """True iff (1-r)/(1+r)^3 <= |phi'(z)| <= (1+r)/(1-r)^3 at random points."""
    _require_normalized(spec)
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0.0, 1.0, samples)) * (1 - 1e-9)
    z = r * np.exp(2j * pi * rng.uniform(0.0, 1.0, samples))
    d = np.abs(spec.dphi(z))
    lo = (1 - r) / (1 + r) ** 3
    hi = (1 + r) / (1 - r) ** 3
    return bool(np.all(d >= lo * (1 - tol)) and np.all(d <= hi * (1 + tol)))


# ---------------------------------------------------------------------------
# Q(alpha)

@dataclass
class DilatationResult:
    alpha: float
    value: float | None          # None when DIVERGENT
    shell_sums: list[float]
    radii: list[float]
    tail: float = 0.0
    map_label: str = ""
    notes: list[str] = field(default_factory=list)

    @property
    def divergent(self) -> bool:
        return self.value is None

    @property
    def finite(self) -> bool:
        return self.value is not None

    def to_json(self) -> dict:
        return {
            "map": self.map_label,
            "alpha": self.alpha,
            "value": self.value if self.value is not None else "DIVERGENT",
            "divergent": self.divergent,
            "tail": self.tail,
            "shell_sums": self.shell_sums,
            "radii": self.radii,
            "notes": self.notes,
        }


_GX, _GW = np.polynomial.legendre.leggauss(RADIAL_ORDER)
_AX, _AW = np.polynomial.legendre.leggauss(ANGULAR_ORDER)


def _panel(f, r, a, b):
    """Gauss estimate of int_a^b f(r, t) dt for every radius in r (per panel)."""
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    t = mid[:, None] + half[:, None] * _AX[None, :]           # (P, G)
    vals = f(r[None, :, None], t[:, None, :])                 # (P, R, G)
    return half[:, None] * (vals @ _AW)                       # (P, R)


def _angular(f, r, rtol=1e-11, max_depth=48):
    """Adaptive composite Gauss in theta over [0, 2 pi] for each radius in r."""
    edges = np.linspace(0.0, 2.0 * pi, ANGULAR_PANELS + 1)
    a, b = edges[:-1], edges[1:]
    est = _panel(f, r, a, b)
    total = np.zeros(len(r))
    for _ in range(max_depth):
        m = 0.5 * (a + b)
        left, right = _panel(f, r, a, m), _panel(f, r, m, b)
        fine = left + right
        scale = np.abs(est).sum(axis=0) + np.abs(total)
        err = np.abs(fine - est).max(axis=1)
        done = err <= rtol * scale.max() / max(len(a), 1) + 1e-300
        total += fine[done].sum(axis=0)
        keep = ~done
        if not keep.any():
            return total
        a = np.concatenate([a[keep], m[keep]])
        b = np.concatenate([m[keep], b[keep]])
        est = np.concatenate([left[keep], right[keep]])
    return total + est.sum(axis=0)


def shell_radii(shells: int = DEFAULT_SHELLS) -> list[float]:
    return [0.0] + [1.0 - 2.0 ** (-k) for k in range(1, shells + 1)]


def q_alpha(spec: ConformalMapSpec, alpha: float, shells: int = DEFAULT_SHELLS) -> DilatationResult:
    """Integral of |phi'|^alpha over the unit disc, or DIVERGENT.

    A run of ``DIVERGENCE_RUN`` non-decreasing shell sums (relative slack
    ``DIVERGENCE_SLACK``) or a total beyond ``DIVERGENCE_GROWTH`` times the
    first shell marks the integral DIVERGENT.  Otherwise the tail beyond the
    last shell is extrapolated geometrically from the last two shells.
    """
    alpha = float(alpha)

    def f(r, t):
        return np.abs(spec.dphi(r * np.exp(1j * t))) ** alpha * r

    radii = shell_radii(shells)
    sums = []
    for r0, r1 in zip(radii[:-1], radii[1:]):
        r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * _GX
        ang = _angular(f, r)
        sums.append(float(0.5 * (r1 - r0) * (_GW @ ang)))
    res = DilatationResult(alpha, None, sums, radii, map_label=spec.label)
    total = float(np.sum(sums))
    tail_run = sums[-DIVERGENCE_RUN:]
    nondecreasing = len(sums) >= DIVERGENCE_RUN and all(
        b >= a * (1.0 - DIVERGENCE_SLACK) for a, b in zip(tail_run[:-1], tail_run[1:]))
    if nondecreasing or total > DIVERGENCE_GROWTH * sums[0]:
        res.notes.append("shell sums stop decaying" if nondecreasing else "runaway growth")
        return res
    ratio = sums[-1] / sums[-2] if sums[-2] > 0 else 0.0
    tail = sums[-1] * ratio / (1.0 - ratio) if 0 <= ratio < 1 else 0.0
    res.tail = tail
    res.value = total + tail
    return res


def hi_probe(spec: ConformalMapSpec, alpha_grid, shells: int = DEFAULT_SHELLS):
    """Classify each alpha; returns (pairs, window) with window the finite range seen."""
    pairs = [(float(a), q_alpha(spec, a, shells).finite) for a in alpha_grid]
    ok = [a for a, fin in pairs if fin]
    window = (min(ok), max(ok)) if ok else None
    return pairs, window


# ---------------------------------------------------------------------------
# inverse form: integral over the image of |(phi^-1)'|^(2 - alpha)

# 7-point degree-5 rule on the reference triangle (barycentric points, weights sum to 1)
_S15 = np.sqrt(15.0)
_A1, _B1 = (6 - _S15) / 21, (9 + 2 * _S15) / 21
_A2, _B2 = (6 + _S15) / 21, (9 - 2 * _S15) / 21
TRI_POINTS = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [_A1, _A1, _B1], [_A1, _B1, _A1], [_B1, _A1, _A1],
    [_A2, _A2, _B2], [_A2, _B2, _A2], [_B2, _A2, _A2],
])
TRI_WEIGHTS = np.array([9 / 40] + [(155 - _S15) / 1200] * 3 + [(155 + _S15) / 1200] * 3)


def image_polygon(spec: ConformalMapSpec, n: int = 2048) -> PolygonalCurve:
    if not spec.bounded:
        raise ValueError("the KOEBE image is unbounded")
    w = spec.phi(np.exp(2j * pi * np.arange(n) / n))
    return PolygonalCurve.from_points(np.column_stack([w.real, w.imag]))


def q_alpha_inverse_form(spec: ConformalMapSpec, alpha: float, n_boundary: int = 512,
                         h: float | None = None) -> float:
    """Integral over the image polygon of |phi'(phi^-1(w))|^(alpha - 2)."""
    if spec.kind is MapKind.KOEBE:
        raise ValueError("KOEBE has an unbounded image; no inverse form")
    poly = image_polygon(spec, n_boundary)
    v = poly.vertices
    size = float(np.ptp(v, axis=0).max())
    mesh = triangulate(poly, h or size / 40.0)
    p = mesh.nodes[mesh.triangles]                          # (T, 3, 2)
    q = np.einsum("qk,tkd->tqd", TRI_POINTS, p)              # (T, Q, 2)
    w = q[..., 0] + 1j * q[..., 1]
    dens = np.abs(spec.dphi(spec.inverse(w))) ** (alpha - 2.0)
    area = mesh.signed_areas()
    return float(area @ (dens @ TRI_WEIGHTS))
