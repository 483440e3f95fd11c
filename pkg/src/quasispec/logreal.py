"""
Positive reals stored by their natural logarithm.

Some of the eigenvalue bounds handled by this package have logarithms that
are themselves far outside floating-point range (``ln x ~ e^(10^21)``).  A
``LogReal`` therefore has two storage levels:

* level 1: ``x = exp(ln)`` with ``|ln| <= LN_CAP``;
* level 2 ("tower"): ``x = exp(exp(tower) + ln)``, used once ``ln`` would
  exceed ``LN_CAP``.  The additive part ``ln`` is kept separately so that
  factors such as the domain area still change the logarithm exactly.

The additive part is a triple-double ``ln + lo + lo2``: with ``ln ~ 10^21``
a plain float cannot register a factor of 2, and a double-double only holds
it to ~1e-11.  Products and powers round the exact rational result back to
the triple.

Zero is represented by ``ln == -inf`` with no tower.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

LN_CAP = 1e300
# exp(TOWER_FOLD) == LN_CAP; towers below this are folded back into level 1.
TOWER_FOLD = math.log(LN_CAP)
_EXP_MAX = 709.0

Number = Union[int, float]


def log1mexp(x: float) -> float:
    """Stable ``log(1 - exp(x))`` for ``x <= 0``."""
    if x > 0:
        raise ValueError(f"log1mexp requires x <= 0, got {x}")
    if x == 0:
        return -math.inf
    if x > -math.log(2.0):
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


def logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def _split(total: Fraction) -> tuple[float, float, float]:
    hi = float(total)
    rest = total - Fraction(hi)
    lo = float(rest)
    return hi, lo, float(rest - Fraction(lo))


def _exact(hi: float, lo: float, lo2: float = 0.0) -> Fraction:
    return Fraction(hi) + Fraction(lo) + Fraction(lo2)


def _pack(total: Fraction, tower: float | None = None):
    hi, lo, lo2 = _split(total)
    return hi, tower, lo, lo2


class LogReal:
    """A non-negative real number carried in log space."""

    __slots__ = ("ln", "lo", "lo2", "tower")

    def __init__(self, ln: float, tower: float | None = None, lo: float = 0.0,
                 lo2: float = 0.0):
        ln, lo, lo2 = float(ln), float(lo), float(lo2)
        if math.isnan(ln) or ln == math.inf or not (math.isfinite(lo) and math.isfinite(lo2)):
            raise ValueError(f"invalid log value {ln} (+ {lo} + {lo2})")
        if tower is not None:
            tower = float(tower)
            if not math.isfinite(tower):
                raise OverflowError("tower exponent is not finite")
            if ln == -math.inf:
                raise ValueError("tower numbers cannot carry a zero offset")
            if tower < TOWER_FOLD:
                ln, lo, lo2 = _split(Fraction(math.exp(tower)) + _exact(ln, lo, lo2))
                tower = None
        if ln == -math.inf:
            lo = lo2 = 0.0
        elif lo != 0.0 or lo2 != 0.0:
            ln, lo, lo2 = _split(_exact(ln, lo, lo2))
        if tower is None and abs(ln) > LN_CAP and ln != -math.inf:
            if ln < 0:
                raise OverflowError("LogReal underflow: ln below -1e300")
            tower, ln, lo, lo2 = math.log(ln), 0.0, 0.0, 0.0
        self.ln = ln
        self.lo = lo
        self.lo2 = lo2
        self.tower = tower

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls) -> "LogReal":
        return cls(-math.inf)

    @classmethod
    def one(cls) -> "LogReal":
        return cls(0.0)

    @classmethod
    def from_float(cls, x: Number) -> "LogReal":
        if x < 0 or math.isnan(x):
            raise ValueError(f"LogReal holds non-negative values only, got {x}")
        if x == 0:
            return cls.zero()
        return cls(math.log(x))

    @classmethod
    def exp_of(cls, x: Union[Number, "LogReal"]) -> "LogReal":
        """Return ``exp(x)``; ``x`` may itself be a ``LogReal``."""
        if not isinstance(x, LogReal):
            return cls(float(x))
        if x.is_zero:
            return cls.one()
        if x.tower is not None:
            raise OverflowError("exp of a tower number needs a third level")
        if x.ln <= TOWER_FOLD:
            return cls(math.exp(x.ln) * math.exp(x.lo))
        return cls(0.0, tower=x.ln + x.lo)

    @classmethod
    def from_ln(cls, ln: Union[Fraction, float], tower: float | None = None) -> "LogReal":
        """Build from an exact (rational) logarithm, rounded to the triple-double."""
        return cls(*_pack(Fraction(ln), tower))

    @staticmethod
    def coerce(x: Union[Number, "LogReal"]) -> "LogReal":
        return x if isinstance(x, LogReal) else LogReal.from_float(x)

    # inspection ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.ln == -math.inf and self.tower is None

    @property
    def is_tower(self) -> bool:
        return self.tower is not None

    def log(self) -> float:
        """Natural log as a float (``inf`` for tower numbers)."""
        if self.tower is not None:
            return math.inf
        return self.ln + (self.lo + self.lo2)

    def loglog(self) -> float:
        """``ln(ln x)`` for ``x > 1``."""
        if self.tower is not None:
            return self.tower + math.log1p(self.ln * math.exp(-self.tower))
        if self.ln <= 0:
            raise ValueError("loglog needs a value above 1")
        return math.log(self.ln)

    def to_float(self) -> float:
        if self.tower is not None:
            return math.inf
        if self.ln > _EXP_MAX:
            return math.inf
        return math.exp(self.ln + (self.lo + self.lo2))

    def _offset(self) -> Fraction:
        return _exact(self.ln, self.lo, self.lo2)

    def ln_exact(self) -> Fraction:
        """The logarithm as an exact rational (level-1 numbers only)."""
        if self.tower is not None:
            raise OverflowError("the logarithm of a tower number is not finite")
        if self.is_zero:
            raise ValueError("ln 0 is not finite")
        return self._offset()

    # arithmetic ---------------------------------------------------------

    def __mul__(self, other: Union[Number, "LogReal"]) -> "LogReal":
        other = LogReal.coerce(other)
        if self.is_zero or other.is_zero:
            return LogReal.zero()
        total = self._offset() + other._offset()
        if self.tower is None and other.tower is None:
            return LogReal.from_ln(total)
        if self.tower is None:
            tower = other.tower
        elif other.tower is None:
            tower = self.tower
        else:
            tower = logaddexp(self.tower, other.tower)
        return LogReal.from_ln(total, tower)

    __rmul__ = __mul__

    def __truediv__(self, other: Union[Number, "LogReal"]) -> "LogReal":
        other = LogReal.coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("LogReal division by zero")
        if self.is_zero:
            return LogReal.zero()
        total = self._offset() - other._offset()
        if other.tower is not None:
            if self.tower is not None and self.tower == other.tower:
                return LogReal.from_ln(total)
            raise OverflowError("dividing by a tower number underflows")
        return LogReal.from_ln(total, self.tower)

    def __rtruediv__(self, other: Number) -> "LogReal":
        return LogReal.coerce(other) / self

    def __pow__(self, x: Number) -> "LogReal":
        x = float(x)
        if x == 0:
            return LogReal.one()
        if self.is_zero:
            if x < 0:
                raise ZeroDivisionError("0 ** negative")
            return LogReal.zero()
        total = self._offset() * Fraction(x)
        if self.tower is None:
            return LogReal.from_ln(total)
        if x < 0:
            raise OverflowError("negative power of a tower number underflows")
        return LogReal.from_ln(total, self.tower + math.log(x))

    def __add__(self, other: Union[Number, "LogReal"]) -> "LogReal":
        other = LogReal.coerce(other)
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        hi, lo = (self, other) if self >= other else (other, self)
        same_level = (hi.tower is None and lo.tower is None) or (
            lo.tower is not None and lo.tower == hi.tower)
        if not same_level:
            # lo/hi is exp(-(something >= ~1e300)); it cannot move hi.
            return hi
        gap = float(lo._offset() - hi._offset())
        return LogReal.from_ln(hi._offset() + Fraction(math.log1p(math.exp(gap))), hi.tower)

    __radd__ = __add__

    def sqrt(self) -> "LogReal":
        return self ** 0.5

    # ordering -----------------------------------------------------------

    def _cmp(self, other: "LogReal") -> int:
        a, b = self, other
        if a.is_zero or b.is_zero:
            return (not a.is_zero) - (not b.is_zero)
        if (a.tower is None and b.tower is None) or (
                a.tower is not None and b.tower is not None and a.tower == b.tower):
            da, db = a._offset(), b._offset()
            return (da > db) - (da < db)
        ta = a.tower if a.tower is not None else -math.inf
        tb = b.tower if b.tower is not None else -math.inf
        if max(ta, tb) < _EXP_MAX:
            la = a._offset() + (Fraction(math.exp(ta)) if a.tower is not None else 0)
            lb = b._offset() + (Fraction(math.exp(tb)) if b.tower is not None else 0)
            return (la > lb) - (la < lb)
        return (ta > tb) - (ta < tb)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (LogReal, int, float)):
            return NotImplemented
        return self._cmp(LogReal.coerce(other)) == 0

    def __lt__(self, other) -> bool:
        return self._cmp(LogReal.coerce(other)) < 0

    def __le__(self, other) -> bool:
        return self._cmp(LogReal.coerce(other)) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(LogReal.coerce(other)) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(LogReal.coerce(other)) >= 0

    def __hash__(self) -> int:
        return hash((self.ln, self.lo, self.lo2, self.tower))

    def log_ratio(self, other: "LogReal") -> float:
        """``ln(self / other)`` for numbers on the same level (exact offsets)."""
        return (self / other).log()

    # serialization ------------------------------------------------------

    def to_json(self) -> dict:
        """``{"ln": x}``, plus ``"ln_lo": [lo, lo2]`` when the low words are non-zero.

        Tower numbers nest as ``{"ln": {"ln": t, "offset": s}}`` with
        ``ln(value) = exp(t) + s`` (low words under ``"offset_lo"``).
        """
        if self.is_zero:
            return {"ln": None}
        low = [self.lo, self.lo2] if (self.lo or self.lo2) else None
        if self.tower is None:
            out = {"ln": self.ln}
            if low:
                out["ln_lo"] = low
            return out
        inner = {"ln": self.tower, "offset": self.ln}
        if low:
            inner["offset_lo"] = low
        return {"ln": inner}

    @classmethod
    def from_json(cls, obj: dict) -> "LogReal":
        ln = obj["ln"]
        if ln is None:
            return cls.zero()
        if isinstance(ln, dict):
            lo, lo2 = ln.get("offset_lo", (0.0, 0.0))
            return cls(ln["offset"], ln["ln"], lo, lo2)
        lo, lo2 = obj.get("ln_lo", (0.0, 0.0))
        return cls(ln, None, lo, lo2)

    def __repr__(self) -> str:
        if self.is_zero:
            return "LogReal(0)"
        lo = f" + {self.lo!r} + {self.lo2!r}" if (self.lo or self.lo2) else ""
        if self.tower is None:
            return f"LogReal(ln={self.ln!r}{lo})"
        return f"LogReal(ln=exp({self.tower!r}) + {self.ln!r}{lo})"


def lmax(*values: LogReal) -> LogReal:
    return max(values)
