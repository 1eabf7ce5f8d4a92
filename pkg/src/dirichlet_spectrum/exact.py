"""Exact rational helpers: square-root comparisons and rational interval arithmetic.

Every predicate that decides whether a construction step is accepted goes
through this module.  Nothing here touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from numbers import Rational as _RationalABC
from typing import Union

Rational = Fraction
Number = Union[int, Fraction]

DEFAULT_BITS = 64

LESS, EQUAL, GREATER = -1, 0, 1


class DomainError(ValueError):
    """Raised when an argument lies outside an operation's domain."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def frac_str(x: Number) -> str:
    """Serialize as 'num/den' (or just 'num' for integers)."""
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def sign(x: Number) -> int:
    return (x > 0) - (x < 0)


def cmp(a: Number, b: Number) -> int:
    return (a > b) - (a < b)


def cmp_sqrt(a_sq: Number, b_sq: Number) -> int:
    """Order of sqrt(a_sq) against sqrt(b_sq); returns -1, 0 or 1."""
    if a_sq < 0 or b_sq < 0:
        raise DomainError("cmp_sqrt needs nonnegative arguments")
    return cmp(a_sq, b_sq)


def sum_sqrt_le(a_sq: Number, b_sq: Number, c_sq: Number) -> bool:
    """Decide sqrt(a_sq) + sqrt(b_sq) <= sqrt(c_sq) exactly."""
    if min(a_sq, b_sq, c_sq) < 0:
        raise DomainError("sum_sqrt_le needs nonnegative arguments")
    rest = c_sq - a_sq - b_sq
    if rest < 0:
        return False
    return 4 * a_sq * b_sq <= rest * rest


def floor_sqrt(r: Number) -> int:
    """floor(sqrt(r)) for a rational r >= 0."""
    r = as_fraction(r)
    if r < 0:
        raise DomainError("floor_sqrt of a negative number")
    n, d = r.numerator, r.denominator
    # sqrt(n/d) = sqrt(n*d)/d and floor(sqrt(n*d)/d) == isqrt(n*d)//d
    return isqrt(n * d) // d


def ceil_sqrt(r: Number) -> int:
    f = floor_sqrt(r)
    return f if f * f == r else f + 1


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Number) -> "RationalInterval":
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Number) -> bool:
        return self.lo <= x <= self.hi

    def issubset(self, other: "RationalInterval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def __add__(self, other):
        other = _iv(other)
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = _iv(other)
        return RationalInterval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _iv(other) - self

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __mul__(self, other):
        other = _iv(other)
        products = (self.lo * other.lo, self.lo * other.hi,
                    self.hi * other.lo, self.hi * other.hi)
        return RationalInterval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _iv(other)
        if other.lo <= 0 <= other.hi:
            raise DomainError("division by an interval containing 0")
        return self * RationalInterval(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other):
        return _iv(other) / self

    def square(self) -> "RationalInterval":
        """Tight enclosure of {x**2}; tighter than self*self when 0 is inside."""
        if self.lo >= 0:
            return RationalInterval(self.lo ** 2, self.hi ** 2)
        if self.hi <= 0:
            return RationalInterval(self.hi ** 2, self.lo ** 2)
        return RationalInterval(0, max(self.lo ** 2, self.hi ** 2))

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"


def _iv(x) -> RationalInterval:
    if isinstance(x, RationalInterval):
        return x
    return RationalInterval.point(x)


def interval_arith(op: str, a: RationalInterval, b: RationalInterval) -> RationalInterval:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown interval operation {op!r}")


def sqrt_enclosure(r: Number, bits: int = DEFAULT_BITS) -> RationalInterval:
    """Rational interval [lo, hi] with lo**2 <= r <= hi**2.

    The width is at most 2**-bits * max(1, hi).  Exact squares give a point.
    """
    r = as_fraction(r)
    if r < 0:
        raise DomainError("sqrt_enclosure of a negative number")
    if bits < 1:
        raise ValueError("bits must be positive")
    if r == 0:
        return RationalInterval(0, 0)
    n, d = r.numerator, r.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return RationalInterval.point(Fraction(rn, rd))
    # width 2**-shift; the extra bits keep it relative for tiny r as well
    extra = max(0, (d.bit_length() - n.bit_length()) // 2 + 2)
    scale = 1 << (bits + 1 + extra)
    s = isqrt((n * scale * scale) // d)
    lo = Fraction(s, scale)
    hi = Fraction(s + 1, scale)
    return RationalInterval(lo, hi)


def sqrt_interval(a: RationalInterval, bits: int = DEFAULT_BITS) -> RationalInterval:
    """Outward enclosure of {sqrt(x) : x in a}; a.lo must be >= 0."""
    if a.lo < 0:
        raise DomainError("sqrt of an interval reaching below 0")
    return RationalInterval(sqrt_enclosure(a.lo, bits).lo, sqrt_enclosure(a.hi, bits).hi)


# 2/sqrt(3) only ever enters through its square 4/3 or through these bounds.
TWO_OVER_SQRT3_SQ = Fraction(4, 3)


def two_over_sqrt3(bits: int = DEFAULT_BITS) -> RationalInterval:
    return sqrt_enclosure(TWO_OVER_SQRT3_SQ, bits)
