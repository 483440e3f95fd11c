"""Upper bounds on 1/mu_1 for quasidiscs, evaluated in log space.

Notation used throughout:

    nu      = 10^(4 alpha) (alpha - 2)/(alpha - 1) (24 pi^2 K^e)^alpha,  e = 2 (or 1)
    C_alpha = 10^6 / [(alpha - 1)(1 - nu)]^(1/alpha)
    R_alpha = ((2 alpha - 2)/(alpha - 2))^((2 alpha - 2)/alpha)
    X0      = pi^2 (2 + pi^4)^2 / (2 ln 3)

The quasidisc bound is

    1/mu_1 <= (K^2 C_alpha^2 / pi) R_alpha exp{K^2 X0} |Omega|,

valid for 2 < alpha < 2K^2/(K^2 - 1) with nu < 1.  The nu condition confines
alpha to (2, 2 + eps*) with eps* ~ 1e-13 for K = 1 and eps* ~ exp(-10^21) for
snowflakes, so alpha is carried as ln(alpha - 2) (see ``Alpha``).  Logarithms
are summed exactly as rationals and rounded once into a triple-double
``LogReal``; this keeps ln bound(2A) - ln bound(A) = ln 2 exact even when the
logarithm itself is ~10^21.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import log, log1p, pi
from typing import Callable, Union

from .capacity import LN_DOUBLING_BASE
from .logreal import LN_CAP, LogReal, log1mexp
from .metrics import QcCoefficient, k_from_ahlfors, turning_square

P1 = 1.84118  # first zero of J1', as printed (not the higher-precision value)
LN10 = log(10.0)
LN_24PI2 = log(24 * pi**2)
LN2 = log(2.0)
LN_PI = log(pi)
WINDOW_ITERATIONS = 200
GOLDEN_ITERATIONS = 100
# ln(alpha - 2) start of the integrability-free search when no cap applies
_LN_EXCESS_HI = 8.0
AUDIT_RTOL = 1e-12

KLike = Union[QcCoefficient, LogReal, float, int]


class BoundError(Exception):
    """Raised with ``code`` in {INFEASIBLE, EMPTY_WINDOW, PRECONDITION}."""

    def __init__(self, code: str, message: str, **diagnostics):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.diagnostics = diagnostics


class NuVariant(enum.Enum):
    K_SQUARED = "k_squared"  # (24 pi^2 K^2)^alpha: quasidisc bound
    K_LINEAR = "k_linear"    # (24 pi^2 K)^alpha: general quasiconformal variant

    @property
    def power(self) -> int:
        return 2 if self is NuVariant.K_SQUARED else 1


class WindowBinding(enum.Enum):
    INTEGRABILITY = "integrability"
    NU_CONDITION = "nu_condition"


@dataclass(frozen=True)
class Alpha:
    """An exponent alpha >= 2 stored as ln(alpha - 2)."""

    ln_excess: float

    def __post_init__(self):
        if math.isnan(self.ln_excess) or self.ln_excess == math.inf:
            raise ValueError("ln(alpha - 2) must be finite or -inf")

    @classmethod
    def of(cls, alpha: float) -> "Alpha":
        alpha = float(alpha)
        if not alpha >= 2:
            raise BoundError("PRECONDITION", f"alpha must be >= 2, got {alpha}")
        return cls(log(alpha - 2.0) if alpha > 2 else -math.inf)

    @property
    def excess(self) -> float:
        return math.exp(self.ln_excess)

    @property
    def value(self) -> float:
        return 2.0 + self.excess

    @property
    def is_two(self) -> bool:
        return self.ln_excess == -math.inf

    def exact(self) -> Fraction:
        return 2 + Fraction(self.excess)

    def to_json(self) -> dict:
        return {"value": self.value,
                "ln_excess": None if self.is_two else self.ln_excess}

    @classmethod
    def from_json(cls, obj: dict) -> "Alpha":
        ln = obj["ln_excess"]
        return cls(-math.inf if ln is None else ln)


def as_alpha(alpha: Union[Alpha, float]) -> Alpha:
    return alpha if isinstance(alpha, Alpha) else Alpha.of(alpha)


def as_k(k: KLike) -> LogReal:
    if isinstance(k, QcCoefficient):
        return k.k
    k = LogReal.coerce(k)
    if k < LogReal.one():
        raise BoundError("PRECONDITION", "K must be >= 1")
    return k


def _ln_k(k: LogReal) -> Fraction:
    if k.is_tower:
        raise BoundError("EMPTY_WINDOW", "ln K exceeds 1e300; no alpha > 2 is representable",
                         k=k.to_json())
    return k.ln_exact()


# ---------------------------------------------------------------------------
# sub-constants

def _ln_nu(a: Alpha, ln_k_power: Fraction) -> Fraction:
    """ln nu with ``ln_k_power`` = ln(K^e); exact given the rounded inputs."""
    af = a.exact()
    return (af * (Fraction(4 * LN10) + Fraction(LN_24PI2) + ln_k_power)
            + Fraction(a.ln_excess) - Fraction(log1p(a.excess)))


def nu(alpha: Union[Alpha, float], k: KLike, variant: NuVariant = NuVariant.K_SQUARED) -> LogReal:
    a = as_alpha(alpha)
    if a.is_two:
        return LogReal.zero()
    return LogReal.from_ln(_ln_nu(a, variant.power * _ln_k(as_k(k))))


def _ln_c_alpha(a: Alpha, nu_val: LogReal) -> Fraction:
    if nu_val >= LogReal.one():
        raise BoundError("INFEASIBLE", "nu >= 1", ln_nu=nu_val.log())
    ln_1m = 0.0 if nu_val.is_zero else log1mexp(nu_val.log())
    return Fraction(6 * LN10) - (Fraction(log1p(a.excess)) + Fraction(ln_1m)) / a.exact()


def c_alpha(alpha: Union[Alpha, float], nu_val: LogReal) -> LogReal:
    """10^6 / [(alpha - 1)(1 - nu)]^(1/alpha)."""
    return LogReal.from_ln(_ln_c_alpha(as_alpha(alpha), nu_val))


def _ln_ratio_term(a: Alpha) -> Fraction:
    """ln R_alpha = ((2 alpha - 2)/alpha)(ln(2 alpha - 2) - ln(alpha - 2))."""
    if a.is_two:
        raise BoundError("PRECONDITION", "alpha must exceed 2")
    eps = a.excess
    coeff = Fraction(2.0 * (1.0 + eps) / (2.0 + eps))
    return coeff * (Fraction(LN2) + Fraction(log1p(eps)) - Fraction(a.ln_excess))


def integrability_cap(k: KLike) -> float:
    """ln(2K^2/(K^2 - 1) - 2) = ln 2 - ln(K^2 - 1); +inf at K = 1."""
    ln_k2 = 2 * _ln_k(as_k(k))
    if ln_k2 == 0:
        return math.inf
    x = float(ln_k2)
    return LN2 - x - log1mexp(-x)


# ---------------------------------------------------------------------------
# feasibility window

@dataclass(frozen=True)
class AlphaWindow:
    """The open window (2, upper) of admissible exponents.

    ``ln_upper`` is ln(upper - 2).  For a nu-bound window it is the upper end
    of the final bisection bracket (nu >= 1 there) and ``ln_feasible`` the
    lower end (nu < 1); the two are adjacent floats or 200 halvings apart.
    """

    ln_upper: float
    ln_feasible: float
    binding: WindowBinding
    ln_cap: float
    variant: NuVariant
    iterations: int
    lower: float = 2.0

    @property
    def upper(self) -> float:
        return 2.0 + math.exp(self.ln_upper)

    @property
    def feasible_point(self) -> Alpha:
        return Alpha(self.ln_feasible)

    def contains(self, alpha: Union[Alpha, float]) -> bool:
        a = as_alpha(alpha)
        return not a.is_two and a.ln_excess <= self.ln_feasible

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "ln_upper_excess": self.ln_upper,
            "ln_feasible_excess": self.ln_feasible,
            "binding": self.binding.value,
            "ln_cap_excess": None if math.isinf(self.ln_cap) else self.ln_cap,
            "variant": self.variant.value,
            "iterations": self.iterations,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AlphaWindow":
        cap = obj["ln_cap_excess"]
        return cls(obj["ln_upper_excess"], obj["ln_feasible_excess"],
                   WindowBinding(obj["binding"]), math.inf if cap is None else cap,
                   NuVariant(obj["variant"]), obj["iterations"], obj["lower"])


def _window_from_ln_k(ln_k: Fraction, variant: NuVariant,
                      iterations: int = WINDOW_ITERATIONS) -> AlphaWindow:
    kp = variant.power * ln_k
    ln_k2 = 2 * ln_k
    if ln_k2 == 0:
        cap = math.inf
    else:
        x = float(ln_k2)
        cap = LN2 - x - log1mexp(-x)

    def feasible(x: float) -> bool:
        return _ln_nu(Alpha(x), kp) < 0

    hi = cap if math.isfinite(cap) else _LN_EXCESS_HI
    if feasible(hi):
        if math.isfinite(cap):
            return AlphaWindow(cap, math.nextafter(cap, -math.inf), WindowBinding.INTEGRABILITY,
                               cap, variant, 0)
        raise BoundError("PRECONDITION", "nu stays below 1 far from 2; window search failed")
    # near alpha = 2, ln nu ~ 2 (4 ln 10 + ln 24 pi^2 + ln K^e) + ln(alpha - 2)
    scale = 2.0 * float(Fraction(4 * LN10) + Fraction(LN_24PI2) + kp)
    lo = min(-scale - 100.0, hi - 1.0)
    while not feasible(lo):
        lo *= 2.0
        if lo < -LN_CAP:
            raise BoundError("EMPTY_WINDOW", "no representable alpha > 2 has nu < 1",
                             ln_k=float(ln_k), last_ln_excess=lo)
    it = 0
    for it in range(1, iterations + 1):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return AlphaWindow(hi, lo, WindowBinding.NU_CONDITION, cap, variant, it)


def alpha_window(k: KLike, variant: NuVariant = NuVariant.K_SQUARED,
                 iterations: int = WINDOW_ITERATIONS) -> AlphaWindow:
    """(2, min(2K^2/(K^2 - 1), alpha*)) with nu(alpha*) = 1, bisected in ln(alpha - 2)."""
    return _window_from_ln_k(_ln_k(as_k(k)), variant, iterations)


# ---------------------------------------------------------------------------
# the bounds

@dataclass
class BoundValue:
    """A bound on 1/mu_1 with the sub-constants it was assembled from."""

    value: LogReal
    alpha: Alpha
    nu: LogReal | None = None
    c_alpha: LogReal | None = None
    terms: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "alpha": self.alpha.to_json(),
            "nu": None if self.nu is None else self.nu.to_json(),
            "c_alpha": None if self.c_alpha is None else self.c_alpha.to_json(),
            "terms": dict(self.terms),
        }


def bound_dilatation(q_value: float, alpha: Union[Alpha, float]) -> LogReal:
    """(4 / pi^(2/alpha)) R_alpha Q^(2/alpha) for Q = Q(alpha, Omega)."""
    return _dilatation(q_value, as_alpha(alpha)).value


def _dilatation(q_value: float, a: Alpha) -> BoundValue:
    if a.is_two:
        raise BoundError("PRECONDITION", "alpha must exceed 2")
    if q_value is None or not (q_value > 0 and math.isfinite(q_value)):
        raise BoundError("PRECONDITION", f"Q(alpha) must be finite and positive, got {q_value}")
    two_over = 2 / a.exact()
    ratio = _ln_ratio_term(a)
    ln = Fraction(2 * LN2) - two_over * Fraction(LN_PI) + ratio + two_over * Fraction(log(q_value))
    return BoundValue(LogReal.from_ln(ln), a, terms={
        "ln_ratio_term": float(ratio), "q_alpha": q_value})


def _assemble(ln_k2: Fraction, ln_exponent: Fraction, ln_prefactor: Fraction,
              area: float, a: Alpha) -> BoundValue:
    """C_alpha^2 R_alpha exp{exp(ln_exponent)} |Omega| exp(ln_prefactor), nu from ln K^2."""
    if not area > 0:
        raise BoundError("PRECONDITION", f"area must be positive, got {area}")
    if a.is_two:
        raise BoundError("PRECONDITION", "alpha must exceed 2")
    nu_val = LogReal.from_ln(_ln_nu(a, ln_k2))
    ln_c = _ln_c_alpha(a, nu_val)
    ratio = _ln_ratio_term(a)
    ln_pre = ln_prefactor + 2 * ln_c + ratio + Fraction(log(area))
    expo = LogReal.exp_of(LogReal.from_ln(ln_exponent))
    value = LogReal.from_ln(ln_pre) * expo
    terms = {
        "ln_k_squared": float(ln_k2),
        "ln_c_alpha": float(ln_c),
        "ln_ratio_term": float(ratio),
        "ln_exponent": float(ln_exponent),
        "ln_area": log(area),
    }
    return BoundValue(value, a, nu_val, LogReal.from_ln(ln_c), terms)


def _quasidisc(k: LogReal, area: float, a: Alpha) -> BoundValue:
    ln_k2 = 2 * _ln_k(k)
    return _assemble(ln_k2, ln_k2 + Fraction(LN_DOUBLING_BASE), ln_k2 - Fraction(LN_PI), area, a)


def bound_quasidisc(k: KLike, area: float, alpha: Union[Alpha, float]) -> LogReal:
    """(K^2 C_alpha^2 / pi) R_alpha exp{K^2 X0} |Omega| for a K-quasidisc."""
    return _quasidisc(as_k(k), area, as_alpha(alpha)).value


def _printed_form(sq: Fraction, copies: int, area: float, a: Alpha) -> BoundValue:
    """C_alpha^2 e^(m sq) / (2^(10m) pi) R_alpha exp{pi^2 (2+pi^4)^2 e^(m sq) / (2^(10m+1) ln 3)} |Omega|.

    ``sq`` = (1 + e^(2 pi) C^5)^2 and ``m`` = ``copies`` (2 or 4).
    """
    m = copies
    lead = m * sq
    ln_k2 = lead - 10 * m * Fraction(LN2)
    ln_x = Fraction(log(pi**2 * (2 + pi**4) ** 2 / log(3.0)))
    ln_exponent = lead + ln_x - (10 * m + 1) * Fraction(LN2)
    ln_pre = lead - 10 * m * Fraction(LN2) - Fraction(LN_PI)
    out = _assemble(ln_k2, ln_exponent, ln_pre, area, a)
    out.terms["ln_leading"] = float(lead)
    return out


def _square_term(c: float) -> Fraction:
    sq = turning_square(c)
    if not isinstance(sq, Fraction):
        raise BoundError("EMPTY_WINDOW", f"(1 + e^(2 pi) C^5)^2 overflows for C = {c}")
    return sq


def _turning(c: float, area: float, a: Alpha) -> BoundValue:
    return _printed_form(_square_term(c), 2, area, a)


def bound_bounded_turning(c: float, area: float, alpha: Union[Alpha, float]) -> LogReal:
    """Quasidisc bound written for a curve with three-point constant C."""
    return _turning(c, area, as_alpha(alpha)).value


def snowflake_constant(p: float) -> float:
    if not 0.25 <= p < 0.5:
        raise BoundError("PRECONDITION", f"p out of [0.25, 0.5): {p}")
    return 16.0 / (1.0 - 2.0 * p)


def _snowflake(p: float, area: float, a: Alpha) -> BoundValue:
    c = snowflake_constant(p)
    out = _printed_form(_square_term(c), 4, area, a)
    out.terms["c"] = c
    return out


def bound_snowflake(p: float, area: float, alpha: Union[Alpha, float]) -> LogReal:
    """Bound for the snowflake S_p with C = 16/(1 - 2p) and exponents doubled."""
    return _snowflake(p, area, as_alpha(alpha)).value


def turning_window(c: float) -> AlphaWindow:
    sq = _square_term(c)
    return _window_from_ln_k((2 * sq - 20 * Fraction(LN2)) / 2, NuVariant.K_SQUARED)


def snowflake_window(p: float) -> AlphaWindow:
    sq = _square_term(snowflake_constant(p))
    return _window_from_ln_k((4 * sq - 40 * Fraction(LN2)) / 2, NuVariant.K_SQUARED)


# ---------------------------------------------------------------------------
# classical bounds

@dataclass(frozen=True)
class ClassicalBounds:
    szego_upper: float
    polya_upper: float
    pw_lower: float | None

    @property
    def upper(self) -> float:
        return min(self.szego_upper, self.polya_upper)

    def sandwich(self, mu1: float) -> bool:
        lower = self.pw_lower if self.pw_lower is not None else 0.0
        return lower <= mu1 <= self.upper

    def to_json(self) -> dict:
        return {"szego_upper": self.szego_upper, "polya_upper": self.polya_upper,
                "pw_lower": self.pw_lower}

    @classmethod
    def from_json(cls, obj: dict) -> "ClassicalBounds":
        return cls(obj["szego_upper"], obj["polya_upper"], obj["pw_lower"])


def classical_bounds(area: float, diameter: float | None = None, convex: bool = False) -> ClassicalBounds:
    """p1^2 pi/|Omega| and 4 pi/|Omega| above mu_1; pi^2/d^2 below it for convex domains."""
    if not area > 0:
        raise BoundError("PRECONDITION", f"area must be positive, got {area}")
    pw = None
    if convex:
        if diameter is None or not diameter > 0:
            raise BoundError("PRECONDITION", "convex lower bound needs the diameter")
        pw = pi**2 / diameter**2
    return ClassicalBounds(P1**2 * pi / area, 4 * pi / area, pw)


# ---------------------------------------------------------------------------
# optimisation over alpha

def _key(v: LogReal | None):
    return _Inf if v is None else v


class _InfType:
    def __gt__(self, other):
        return other is not self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __ge__(self, other):
        return True


_Inf = _InfType()


def best_alpha(bound_fn: Callable[[Alpha], LogReal],
               window: Union[AlphaWindow, tuple[float, float]],
               iterations: int = GOLDEN_ITERATIONS,
               span: float = 64.0) -> tuple[Alpha, LogReal]:
    """Golden-section minimisation of ``bound_fn`` over ln(alpha - 2).

    For an ``AlphaWindow`` the search covers ``span`` units of ln(alpha - 2)
    below its last feasible point; a plain ``(lo, hi)`` pair of alpha values
    is searched as given (``lo = 2`` is replaced by ``hi``'s log minus ``span``).
    Points where ``bound_fn`` raises ``BoundError`` count as +infinity.
    """
    if isinstance(window, AlphaWindow):
        hi = window.ln_feasible
        lo = hi - max(span, 1e-3 * abs(hi))
    else:
        a_lo, a_hi = window
        if not 2 <= a_lo < a_hi:
            raise BoundError("INFEASIBLE", f"empty alpha range ({a_lo}, {a_hi})")
        hi = log(a_hi - 2.0)
        lo = log(a_lo - 2.0) if a_lo > 2 else hi - span

    def f(x: float):
        try:
            return bound_fn(Alpha(x))
        except BoundError:
            return None

    g = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iterations):
        if _key(f1) <= _key(f2):
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = f(x2)
    candidates = [(x, v) for x, v in ((x1, f1), (x2, f2), (hi, f(hi))) if v is not None]
    if not candidates:
        raise BoundError("INFEASIBLE", "bound is infeasible throughout the window")
    x, v = min(candidates, key=lambda t: t[1])
    return Alpha(x), v


# ---------------------------------------------------------------------------
# formula audit

def _same(a: LogReal, b: LogReal, rtol: float = AUDIT_RTOL) -> tuple[bool, float | None]:
    """Agreement of two bounds in log space; returns (agree, relative ln gap)."""
    if a.is_tower != b.is_tower:
        return False, None
    if a.is_tower:
        gap = abs(a.tower - b.tower) / max(abs(a.tower), 1.0)
        off = abs(a.ln - b.ln) / max(abs(a.ln), abs(b.ln), 1.0)
        g = max(gap, off)
    else:
        g = abs(a.log() - b.log()) / max(abs(a.log()), 1.0)
    return g <= rtol, g


def formula_audit(c: float, area: float = 1.0) -> dict:
    """Compare the printed C-forms against the quasidisc bound with K from C.

    The two-copy form should coincide with the quasidisc bound at
    K = k_from_ahlfors(C); the four-copy (snowflake) form coincides with it
    only at K = k_from_ahlfors(C)^2.  Both comparisons are reported; neither
    form is derived from the other.
    """
    win = _window_from_ln_k((4 * _square_term(c) - 40 * Fraction(LN2)) / 2, NuVariant.K_SQUARED)
    a = win.feasible_point
    k = k_from_ahlfors(c).k
    quasi = _quasidisc(k, area, a).value
    quasi_sq = _quasidisc(k * k, area, a).value
    turning = _turning(c, area, a).value
    four = _printed_form(_square_term(c), 4, area, a).value
    t_ok, t_gap = _same(turning, quasi)
    f_ok, f_gap = _same(four, quasi)
    s_ok, s_gap = _same(four, quasi_sq)
    return {
        "c": c,
        "alpha": a.to_json(),
        "two_copy_vs_quasidisc": {"agree": t_ok, "rel_gap": t_gap},
        "four_copy_vs_quasidisc": {"agree": f_ok, "rel_gap": f_gap},
        "four_copy_vs_quasidisc_k_squared": {"agree": s_ok, "rel_gap": s_gap},
        "note": ("four-copy form equals the quasidisc bound with K replaced by K^2"
                 if s_ok and not f_ok else "unexpected relationship between the printed forms"),
    }
