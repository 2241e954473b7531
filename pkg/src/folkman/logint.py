"""Certified enclosures of positive reals in base-2 logarithmic scale.

A :class:`LogInterval` stores an interval ``[lo, hi]`` with the guarantee
``2**lo <= x <= 2**hi`` for the represented quantity ``x``.  All endpoint
arithmetic goes through a private mpmath interval context at 80 bits, which
rounds lower endpoints down and upper endpoints up.  Magnitudes such as
``3**(400 * 3**4)`` are therefore carried without overflow, and comparisons
between two enclosures only produce a definite answer when the enclosures
are disjoint.
"""

from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction
from numbers import Rational, Real

from mpmath import mp, mpf
from mpmath.ctx_iv import MPIntervalContext, ivmpf
from mpmath.libmp import to_float

PRECISION = 80

_ctx = MPIntervalContext()
_ctx.prec = PRECISION

# shared interval context for callers that need raw interval arithmetic
ctx = _ctx

# Used only to judge containment of exact rationals; never feeds results.
_fine = MPIntervalContext()
_fine.prec = 4 * PRECISION


class DomainError(ValueError):
    """Operation undefined for the given enclosure (log of zero, etc.)."""


class Verdict(str, Enum):
    CERTIFIED_TRUE = "CertifiedTrue"
    CERTIFIED_FALSE = "CertifiedFalse"
    INDETERMINATE = "Indeterminate"

    def __str__(self) -> str:
        return self.value


def as_fraction(x) -> Fraction:
    """Exact rational for ``x``.

    Floats go through their shortest decimal repr, so ``0.1`` means 1/10.
    Strings are parsed by :class:`fractions.Fraction`.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a quantity")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite value {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as an exact rational")


def _iv(x, ctx=_ctx) -> ivmpf:
    """Enclosure of a real number (or of a LogInterval's value) as an interval."""
    if isinstance(x, ivmpf):
        return x
    if isinstance(x, LogInterval):
        return x.value_iv()
    if isinstance(x, tuple):
        return ctx.mpf([x[0], x[1]])
    q = as_fraction(x)
    if q.denominator == 1:
        return ctx.mpf(q.numerator)
    return ctx.mpf(q.numerator) / ctx.mpf(q.denominator)


def _log2_of_rational(q: Fraction, ctx=_ctx) -> ivmpf:
    if q <= 0:
        raise DomainError(f"log of non-positive value {q}")
    num, den = q.numerator, q.denominator
    # split off powers of two exactly so huge integers keep their full accuracy
    shift = 0
    tz = (num & -num).bit_length() - 1
    num >>= tz
    shift += tz
    tz = (den & -den).bit_length() - 1
    den >>= tz
    shift -= tz
    lg = ctx.mpf(shift)
    if num != 1:
        lg = lg + ctx.log(ctx.mpf(num)) / ctx.ln2
    if den != 1:
        lg = lg - ctx.log(ctx.mpf(den)) / ctx.ln2
    return lg


def _ilo(x: ivmpf) -> mpf:
    return mp.make_mpf(x._mpi_[0])


def _ihi(x: ivmpf) -> mpf:
    return mp.make_mpf(x._mpi_[1])


def _sub_down(a: mpf, b: mpf) -> float:
    return _down(mp.make_mpf((_ctx.mpf(a) - _ctx.mpf(b))._mpi_[0]))


def _sub_up(a: mpf, b: mpf) -> float:
    return _up(mp.make_mpf((_ctx.mpf(a) - _ctx.mpf(b))._mpi_[1]))


def _down(x: mpf) -> float:
    return to_float(x._mpf_, rnd="f")


def _up(x: mpf) -> float:
    return to_float(x._mpf_, rnd="c")


class LogInterval:
    """Positive real ``x`` known to satisfy ``2**lo <= x <= 2**hi``.

    ``LogInterval.zero()`` and ``LogInterval.infinity()`` encode the two
    endpoints of ``[0, +inf]``.  Instances are immutable.
    """

    __slots__ = ("_L",)

    def __init__(self, log2: ivmpf):
        if not isinstance(log2, ivmpf):
            raise TypeError("LogInterval wraps an mpmath interval; use a constructor")
        if _ilo(log2) > _ihi(log2):
            raise DomainError("empty enclosure")
        object.__setattr__(self, "_L", log2)

    def __setattr__(self, name, value):
        raise AttributeError("LogInterval is immutable")

    def __reduce__(self):
        lo, hi = self._L._mpi_
        return (_rebuild, (lo, hi))

    # constructors -------------------------------------------------------

    @classmethod
    def exact(cls, x) -> LogInterval:
        """Tightest enclosure of an exact non-negative rational."""
        if isinstance(x, LogInterval):
            return x
        q = as_fraction(x)
        if q == 0:
            return cls.zero()
        if q < 0:
            raise DomainError(f"negative value {q} has no log-scale form")
        return cls(_log2_of_rational(q))

    @classmethod
    def from_log2(cls, lo, hi=None) -> LogInterval:
        """Enclosure from log2 bounds; a single argument gives an exact log2."""
        lo_iv = _iv(lo)
        hi_iv = lo_iv if hi is None else _iv(hi)
        return cls(_ctx.mpf([_ilo(lo_iv), _ihi(hi_iv)]))

    @classmethod
    def pow2(cls, e) -> LogInterval:
        """``2**e`` for a real exponent ``e`` (number, interval, or LogInterval value)."""
        return cls(_iv(e))

    @classmethod
    def zero(cls) -> LogInterval:
        return cls(_ctx.mpf(["-inf", "-inf"]))

    @classmethod
    def infinity(cls) -> LogInterval:
        return cls(_ctx.mpf(["inf", "inf"]))

    @classmethod
    def one(cls) -> LogInterval:
        return cls(_ctx.mpf(0))

    # inspection ----------------------------------------------------------

    @property
    def log2_iv(self) -> ivmpf:
        return self._L

    @property
    def lo(self) -> mpf:
        return _ilo(self._L)

    @property
    def hi(self) -> mpf:
        return _ihi(self._L)

    @property
    def width(self) -> float:
        if self.is_zero or self.is_infinite:
            return 0.0
        return _sub_up(self.hi, self.lo)

    @property
    def is_zero(self) -> bool:
        return self.hi == mpf("-inf")

    @property
    def is_infinite(self) -> bool:
        return self.lo == mpf("inf")

    def log2_bounds(self) -> tuple[float, float]:
        """Outward-rounded float bounds on log2 of the value."""
        return (_down(self.lo), _up(self.hi))

    def value_iv(self, ctx=_ctx) -> ivmpf:
        """Enclosure of the value itself (endpoints may be astronomically large)."""
        if self.is_zero:
            return ctx.mpf(0)
        if self.is_infinite:
            return ctx.mpf(["inf", "inf"])
        return ctx.mpf(2) ** self._L

    def __float__(self) -> float:
        if self.is_zero:
            return 0.0
        mid = (self.lo + self.hi) / 2
        try:
            return float(mpf(2) ** mid)
        except OverflowError:
            return math.inf

    def log2_mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    def contains(self, x) -> bool:
        """True if the exact rational ``x`` certifiably lies in the enclosure."""
        q = as_fraction(x)
        if q == 0:
            return self.is_zero
        if q < 0 or self.is_zero:
            return False
        lo, hi = _log2_of_rational(q, _fine)._mpi_
        return self.lo <= mp.make_mpf(lo) and mp.make_mpf(hi) <= self.hi

    def __repr__(self) -> str:
        if self.is_zero:
            return "LogInterval(0)"
        if self.is_infinite:
            return "LogInterval(+inf)"
        lo, hi = self.log2_bounds()
        return f"LogInterval(log2 in [{lo!r}, {hi!r}])"

    # arithmetic ----------------------------------------------------------

    def __mul__(self, other) -> LogInterval:
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            if self.is_infinite or other.is_infinite:
                raise DomainError("0 * inf")
            return LogInterval.zero()
        return LogInterval(self._L + other._L)

    __rmul__ = __mul__

    def __truediv__(self, other) -> LogInterval:
        other = _coerce(other)
        if other.is_zero:
            raise DomainError("division by zero")
        if self.is_zero:
            return LogInterval.zero()
        return LogInterval(self._L - other._L)

    def __rtruediv__(self, other) -> LogInterval:
        return _coerce(other) / self

    def __add__(self, other) -> LogInterval:
        other = _coerce(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.is_infinite or other.is_infinite:
            return LogInterval.infinity()
        big, small = (self, other) if self.hi >= other.hi else (other, self)
        d = small._L - big._L
        return LogInterval(big._L + _ctx.log(1 + _ctx.mpf(2) ** d) / _ctx.ln2)

    __radd__ = __add__

    def __sub__(self, other) -> LogInterval:
        """Difference ``self - other``; requires it to be certifiably positive."""
        other = _coerce(other)
        if other.is_zero:
            return self
        d = other._L - self._L
        if not _ihi(d) < 0:
            raise DomainError("difference is not certifiably positive")
        return LogInterval(self._L + _ctx.log(1 - _ctx.mpf(2) ** d) / _ctx.ln2)

    def __rsub__(self, other) -> LogInterval:
        return _coerce(other) - self

    def __pow__(self, e) -> LogInterval:
        e_iv = _iv(e)
        if self.is_zero:
            if _ilo(e_iv) > 0:
                return self
            raise DomainError("zero to a non-positive power")
        return LogInterval(self._L * e_iv)

    def reciprocal(self) -> LogInterval:
        return LogInterval.one() / self

    def sqrt(self) -> LogInterval:
        return self ** Fraction(1, 2)

    def log2(self) -> LogInterval:
        """``log2(x)`` as a LogInterval; needs ``x > 1`` certifiably."""
        if not self.lo > 0:
            raise DomainError("log2 of a value not certifiably above 1")
        return LogInterval(_ctx.log(self._L) / _ctx.ln2)

    def ln(self) -> LogInterval:
        return self.log2() * LogInterval(_ctx.log(_ctx.ln2) / _ctx.ln2)

    def exp2(self) -> LogInterval:
        """``2**x``: the value of ``self`` becomes the new log2."""
        return LogInterval(self.value_iv())

    def exp(self) -> LogInterval:
        return LogInterval(self.value_iv() / _ctx.ln2)

    def neg_exp(self) -> LogInterval:
        """``exp(-x)``, valid for astronomically large ``x``."""
        return LogInterval(-self.value_iv() / _ctx.ln2)


def _rebuild(lo, hi):
    return LogInterval(_ctx.mpf([mp.make_mpf(lo), mp.make_mpf(hi)]))


def _coerce(x) -> LogInterval:
    if isinstance(x, LogInterval):
        return x
    if isinstance(x, (Real, str)):
        return LogInterval.exact(x)
    raise TypeError(f"cannot combine LogInterval with {type(x).__name__}")


def binomial(x, k: int) -> LogInterval:
    """``binom(x, k)`` for an exact integer or an enclosure ``x >= k``."""
    if k < 0:
        raise DomainError("negative lower index")
    if not isinstance(x, LogInterval):
        q = as_fraction(x)
        if q.denominator != 1:
            raise DomainError("binomial needs an integer upper index")
        return LogInterval.exact(math.comb(q.numerator, k))
    acc = LogInterval.one()
    for i in range(k):
        acc = acc * (x - i) if i else acc * x
    return acc / math.factorial(k)


def factorial(m: int) -> LogInterval:
    return LogInterval.exact(math.factorial(m))


def log2_real(x) -> ivmpf:
    """log2 enclosure of an exact positive rational, as a plain interval."""
    return _log2_of_rational(as_fraction(x))


def certify_le(lhs: LogInterval, rhs: LogInterval) -> tuple[Verdict, float]:
    """Certified verdict on ``lhs <= rhs`` and the log2 margin ``rhs.lo - lhs.hi``.

    A positive margin is a proof; a margin below ``-(width of both)`` that
    makes the enclosures disjoint in the other direction is a disproof.
    """
    if lhs.hi <= rhs.lo:
        verdict = Verdict.CERTIFIED_TRUE
    elif lhs.lo > rhs.hi:
        verdict = Verdict.CERTIFIED_FALSE
    else:
        verdict = Verdict.INDETERMINATE
    if lhs.is_infinite or rhs.is_zero:
        return verdict, -math.inf
    if lhs.is_zero or rhs.is_infinite:
        return verdict, math.inf
    return verdict, _sub_down(rhs.lo, lhs.hi)


def interval_to_float_pair(x: ivmpf) -> tuple[float, float]:
    lo, hi = x._mpi_
    return (_down(mp.make_mpf(lo)), _up(mp.make_mpf(hi)))
