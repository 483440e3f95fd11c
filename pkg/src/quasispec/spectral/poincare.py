"""Empirical Poincare-Sobolev and Gagliardo ratios on discs.

These are one-sided sanity checks: a family of smooth test functions can
only exhibit ratios below the sharp constant, so an empirical maximum above
a proven bound points at a quadrature or implementation bug.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

MAX_DEGREE = 6
PS21_CONSTANT = 3.0 * sqrt(pi**3) / 4.0
GAGLIARDO_CONSTANT = 1.0 / (2.0 * sqrt(pi))
QUAD_RTOL = 1e-6


@dataclass(frozen=True)
class TrigPoly:
    """f(x, y) = sum_k a_k cos(m_k x + n_k y) + b_k sin(m_k x + n_k y)."""

    freqs: np.ndarray   # (K, 2)
    a: np.ndarray
    b: np.ndarray

    def _phase(self, x, y):
        return np.multiply.outer(x, self.freqs[:, 0]) + np.multiply.outer(y, self.freqs[:, 1])

    def value(self, x, y):
        ph = self._phase(x, y)
        return np.cos(ph) @ self.a + np.sin(ph) @ self.b

    def grad(self, x, y):
        ph = self._phase(x, y)
        # d/dph of a cos + b sin is -a sin + b cos
        d = -np.sin(ph) * self.a + np.cos(ph) * self.b
        return d @ self.freqs[:, 0], d @ self.freqs[:, 1]


def trig_family(size: int, seed: int, max_degree: int = MAX_DEGREE) -> list[TrigPoly]:
    """Seeded trig polynomials of degree 1..max_degree, coefficients in [-1, 1].

    Low degrees are as likely as high ones so that near-linear functions,
    which come closest to the extremals, are well represented.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < size:
        deg = int(rng.integers(1, max_degree + 1))
        fr = [(m, n) for m in range(deg + 1) for n in range(-deg, deg + 1)
              if 0 < m + abs(n) <= deg and (m > 0 or n > 0)]
        fr = np.array(fr, dtype=float)
        # shrink the frequencies so the family is not dominated by oscillation
        scale = rng.uniform(0.1, 1.0)
        a = rng.uniform(-1, 1, len(fr))
        b = rng.uniform(-1, 1, len(fr))
        out.append(TrigPoly(fr * scale, a, b))
    return out


def disc_grid(center=(0.0, 0.0), radius: float = 1.0, n_r: int = 48, n_t: int = 128):
    """Polar Gauss-Legendre (radius) x trapezoid (angle) rule on a disc.

    Returns x, y, weights; the weights include the Jacobian r dr dtheta.
    """
    g, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (g + 1.0) * radius
    wr = 0.5 * w * radius * r
    t = 2.0 * pi * np.arange(n_t) / n_t
    R, T = np.meshgrid(r, t, indexing="ij")
    W = np.repeat(wr[:, None], n_t, axis=1) * (2.0 * pi / n_t)
    return (center[0] + R * np.cos(T)).ravel(), (center[1] + R * np.sin(T)).ravel(), W.ravel()


def _lp(values, weights, p):
    return float((weights @ np.abs(values) ** p) ** (1.0 / p))


def sobolev_ratio(f: TrigPoly, q: float, p: float, grid) -> float | None:
    """||f - mean||_q / ||grad f||_p on the grid's disc; None for constants."""
    x, y, w = grid
    v = f.value(x, y)
    gx, gy = f.grad(x, y)
    den = _lp(np.hypot(gx, gy), w, p)
    if den <= 1e-14:
        return None
    mean = (w @ v) / w.sum()
    return _lp(v - mean, w, q) / den


def poincare_bound(q: float, p: float) -> float:
    """(2 / pi^k) ((1 - k) / (1/2 - k))^(1 - k) with k = 1/p - 1/q."""
    k = 1.0 / p - 1.0 / q
    if not 0 <= k < 0.5:
        raise ValueError(f"need 0 <= 1/p - 1/q < 1/2, got {k}")
    return 2.0 / pi**k * ((1.0 - k) / (0.5 - k)) ** (1.0 - k)


def poincare_ratio_disc(q: float, p: float, family_size: int = 50, seed: int = 0):
    """Largest family ratio ||f - f_D||_q / ||grad f||_p on the unit disc.

    Returns ``(empirical, bound)``.
    """
    bound = poincare_bound(q, p)
    grid = disc_grid()
    ratios = [sobolev_ratio(f, q, p, grid) for f in trig_family(family_size, seed)]
    return max(r for r in ratios if r is not None), bound


def ps21_ratio_check(family_size: int = 50, seed: int = 0, box: float = 4.0):
    """Largest ||f - f_D||_2 / ||grad f||_1 over sub-discs D(z0, r) of a box.

    Each test function gets a random disc with dist(z0, box edge) > 2r.
    Returns ``(empirical, bound)``.
    """
    rng = np.random.default_rng(seed + 1)
    best = 0.0
    half = box / 2.0
    for f in trig_family(family_size, seed):
        r = rng.uniform(0.05, half / 3.0)
        lim = half - 2.0 * r
        z0 = rng.uniform(-lim, lim, 2)
        ratio = sobolev_ratio(f, 2.0, 1.0, disc_grid(z0, r))
        if ratio is not None:
            best = max(best, ratio)
    return best, PS21_CONSTANT


# compactly supported bumps -------------------------------------------------

def bump_profile(rho: np.ndarray, sharpness: int = 1):
    """exp(1 - 1/(1 - rho^(2s))) on [0, 1) and its derivative; zero outside."""
    rho = np.asarray(rho, dtype=float)
    s2 = 2 * sharpness
    inside = rho < 1.0
    u = np.where(inside, rho**s2, 0.0)
    val = np.where(inside, np.exp(1.0 - 1.0 / np.where(inside, 1.0 - u, 1.0)), 0.0)
    du = s2 * np.where(inside, rho ** (s2 - 1), 0.0)
    der = np.where(inside, -val * du / np.where(inside, (1.0 - u) ** 2, 1.0), 0.0)
    return val, der


@dataclass(frozen=True)
class Bump:
    """f(z) = profile(|z - c| / s) * (1 + amp * g(z)) with g a trig polynomial."""

    center: tuple[float, float]
    scale: float
    sharpness: int = 1
    modulation: TrigPoly | None = None
    amp: float = 0.0

    def value_grad(self, x, y):
        dx, dy = x - self.center[0], y - self.center[1]
        rr = np.hypot(dx, dy)
        prof, dprof = bump_profile(rr / self.scale, self.sharpness)
        safe = np.where(rr > 0, rr, 1.0)
        gx = dprof / self.scale * dx / safe
        gy = dprof / self.scale * dy / safe
        if self.modulation is None or self.amp == 0.0:
            return prof, gx, gy
        m = 1.0 + self.amp * self.modulation.value(x, y)
        mx, my = self.modulation.grad(x, y)
        return prof * m, gx * m + prof * self.amp * mx, gy * m + prof * self.amp * my


def gagliardo_ratio(bump: Bump, n_r: int = 400, n_t: int = 128) -> float | None:
    x, y, w = disc_grid(bump.center, bump.scale, n_r, n_t)
    v, gx, gy = bump.value_grad(x, y)
    den = float(w @ np.hypot(gx, gy))
    if den <= 1e-14:
        return None
    return sqrt(float(w @ v**2)) / den


def bump_family(size: int, seed: int) -> list[Bump]:
    rng = np.random.default_rng(seed)
    polys = trig_family(size, seed + 7, max_degree=3)
    out = []
    for k in range(size):
        out.append(Bump(
            center=tuple(rng.uniform(-2, 2, 2)),
            scale=float(rng.uniform(0.2, 3.0)),
            sharpness=int(rng.choice([1, 2, 4, 8])),
            modulation=polys[k],
            amp=float(rng.uniform(0.0, 0.5)) if k % 2 else 0.0,
        ))
    return out


def gagliardo_ratios(family: list[Bump] | None = None, size: int = 40, seed: int = 0):
    """Largest ||f||_2 / ||grad f||_1 over compactly supported bumps.

    Returns ``(empirical, bound)`` with bound 1/(2 sqrt(pi)).
    """
    family = bump_family(size, seed) if family is None else family
    ratios = [gagliardo_ratio(b) for b in family]
    return max(r for r in ratios if r is not None), GAGLIARDO_CONSTANT


def gagliardo_check(family: list[Bump] | None = None, size: int = 40, seed: int = 0) -> bool:
    best, bound = gagliardo_ratios(family, size, seed)
    return best <= bound * (1.0 + QUAD_RTOL)

