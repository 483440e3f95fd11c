"""Rohde-type snowflake polygons built by iterated four-segment edge replacement."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .curves import CurveError, PolygonalCurve

DEFAULT_VERTEX_CAP = 1_000_000

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


class Rule(enum.Enum):
    ALL_TENT = "tent"
    ALL_FLAT = "flat"
    SEEDED_RANDOM = "random"


@dataclass(frozen=True)
class SnowflakeSpec:
    p: float
    n: int
    rule: Rule = Rule.ALL_TENT
    seed: int = 0

    def __post_init__(self):
        if not (0.25 <= self.p < 0.5):
            raise CurveError(f"p out of [0.25, 0.5): {self.p}")
        if int(self.n) != self.n or self.n < 1:
            raise CurveError(f"n must be an integer >= 1, got {self.n}")
        if not 0 <= self.seed < 2 ** 64:
            raise CurveError("seed must fit in 64 bits")

    @property
    def ahlfors_bound(self) -> float:
        """Bounded-turning constant 16 / (1 - 2p) of the limit curve."""
        return 16.0 / (1.0 - 2.0 * self.p)


def tent_height(p: float) -> float:
    """Height of the symmetric tent whose four segments all have length p."""
    return math.sqrt(max(p * p - (0.5 - p) ** 2, 0.0))


def _replace_edges(v: np.ndarray, tent: np.ndarray, p: float) -> np.ndarray:
    a = v
    u = np.roll(v, -1, axis=0) - a
    # outward normal of a CCW polygon: u rotated by -90 degrees
    normal = np.column_stack([u[:, 1], -u[:, 0]])
    q = np.where(tent, p, 0.25)[:, None]
    h = np.where(tent, tent_height(p), 0.0)[:, None]
    out = np.empty((len(v), 4, 2))
    out[:, 0] = a
    out[:, 1] = a + q * u
    out[:, 2] = a + 0.5 * u + h * normal
    out[:, 3] = a + (1.0 - q) * u
    return out.reshape(-1, 2)


def generate_snowflake(spec: SnowflakeSpec, vertex_cap: int = DEFAULT_VERTEX_CAP) -> PolygonalCurve:
    """Polygon S^n starting from the unit square S^1 (so 4**n edges).

    Each replacement either splits an edge into four equal collinear pieces
    or swaps it for the tent (0,0), (p,0), (1/2,h), (1-p,0), (1,0) in
    edge-local coordinates with the tip on the exterior side.
    """
    if 4 ** spec.n > vertex_cap:
        raise CurveError(f"n={spec.n} gives {4 ** spec.n} vertices, above the cap {vertex_cap}")
    rng = np.random.default_rng(spec.seed) if spec.rule is Rule.SEEDED_RANDOM else None
    v = UNIT_SQUARE.copy()
    for _ in range(spec.n - 1):
        if spec.rule is Rule.ALL_TENT:
            tent = np.ones(len(v), dtype=bool)
        elif spec.rule is Rule.ALL_FLAT:
            tent = np.zeros(len(v), dtype=bool)
        else:
            tent = rng.integers(0, 2, size=len(v)).astype(bool)
        v = _replace_edges(v, tent, spec.p)
    return PolygonalCurve(v)
