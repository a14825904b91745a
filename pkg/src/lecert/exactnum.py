"""Exact rational arithmetic and sound rational-endpoint interval arithmetic.

Rationals are ``fractions.Fraction`` values: Python's implementation already
keeps the canonical reduced form with a positive denominator, which is exactly
the invariant we need, so we use it directly instead of reimplementing it.
Intervals carry exact rational endpoints; every operation returns an interval
containing the exact image of its operands, with no rounding at all except in
``iv_sqrt``, the single place where irrational values enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Fraction

RationalLike = Union[Fraction, int]

#: default enclosure width for square roots (2**-64)
DEFAULT_SQRT_WIDTH = Fraction(1, 2**64)


class DomainError(ValueError):
    """Raised when an operation is applied outside its mathematical domain."""


def rat_of(num: int, den: int = 1) -> Fraction:
    """Canonical fraction num/den.  den must be nonzero."""
    if den == 0:
        raise DomainError("zero denominator")
    return Fraction(num, den)


def rat_to_text(x: Fraction) -> str:
    """Text form used in certificates: "3/2", "-1/2", "0"."""
    return str(Fraction(x))


def rat_from_text(text: str) -> Fraction:
    """Parse the certificate text form.

    Accepts "a/b", plain integers, and the power form "2^-10" / "2^10"
    used for CLI tolerance flags.  Floating point input is rejected:
    certification inputs must be exact.
    """
    t = text.strip().replace("−", "-")
    if "." in t or "e" in t.lower():
        raise DomainError(f"not an exact rational: {text!r}")
    if "^" in t:
        base, _, exp = t.partition("^")
        b = int(base)
        e = int(exp)
        if b == 0 and e <= 0:
            raise DomainError(f"0^{e} undefined")
        return Fraction(b) ** e
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not an exact rational: {text!r}") from exc


def _isqrt_floor(k: int) -> int:
    return math.isqrt(k)


def _isqrt_ceil(k: int) -> int:
    t = math.isqrt(k)
    return t if t * t == k else t + 1


def sqrt_lower(x: Fraction, grid: int) -> Fraction:
    """Largest multiple of 1/grid-ish below sqrt(x); exact for perfect squares."""
    if x < 0:
        raise DomainError("sqrt of negative rational")
    sn, sd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if sn * sn == x.numerator and sd * sd == x.denominator:
        return Fraction(sn, sd)
    lo = Fraction(_isqrt_floor(x.numerator * grid * grid // x.denominator), grid)
    return lo


def sqrt_upper(x: Fraction, grid: int) -> Fraction:
    """Rational upper bound for sqrt(x); exact for perfect squares."""
    if x < 0:
        raise DomainError("sqrt of negative rational")
    sn, sd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if sn * sn == x.numerator and sd * sd == x.denominator:
        return Fraction(sn, sd)
    y = x.numerator * grid * grid
    q = -((-y) // x.denominator)  # ceil division
    return Fraction(_isqrt_ceil(q), grid)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"inverted interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(x: RationalLike) -> "Interval":
        x = Fraction(x)
        return Interval(x, x)

    @staticmethod
    def make(a: "IntervalLike") -> "Interval":
        if isinstance(a, Interval):
            return a
        return Interval.point(a)

    # --- queries -------------------------------------------------------
    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: RationalLike) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    def straddles_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"

    # --- arithmetic ----------------------------------------------------
    def __add__(self, other: "IntervalLike") -> "Interval":
        o = Interval.make(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other: "IntervalLike") -> "Interval":
        o = Interval.make(other)
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other: "IntervalLike") -> "Interval":
        return Interval.make(other) - self

    def __mul__(self, other: "IntervalLike") -> "Interval":
        o = Interval.make(other)
        cands = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(cands), max(cands))

    __rmul__ = __mul__

    def inverse(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise DomainError(f"division by interval containing zero: {self}")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other: "IntervalLike") -> "Interval":
        return self * Interval.make(other).inverse()

    def __rtruediv__(self, other: "IntervalLike") -> "Interval":
        return Interval.make(other) * self.inverse()

    def __pow__(self, e: int) -> "Interval":
        if not isinstance(e, int) or e < 0:
            raise DomainError("interval powers must be non-negative integers")
        if e == 0:
            return Interval.point(1)
        if e % 2 == 1:
            return Interval(self.lo**e, self.hi**e)
        # even power: minimum at 0 if the interval straddles it
        a, b = abs(self.lo), abs(self.hi)
        if self.straddles_zero():
            return Interval(Fraction(0), max(a, b) ** e)
        lo, hi = min(a, b), max(a, b)
        return Interval(lo**e, hi**e)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))


IntervalLike = Union[Interval, Fraction, int]


def iv_arith(op: str, a: IntervalLike, b: IntervalLike) -> Interval:
    """Interval arithmetic by operator symbol; kept for the external surface."""
    a, b = Interval.make(a), Interval.make(b)
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        return a / b
    raise DomainError(f"unknown interval operation {op!r}")


def iv_sqrt(a: IntervalLike, width_target: RationalLike = DEFAULT_SQRT_WIDTH) -> Interval:
    """Sound enclosure of sqrt over [a.lo, a.hi].

    Guarantees lo**2 <= a.lo and hi**2 >= a.hi exactly; the added width is at
    most ``width_target`` (the enclosure inherits the width of ``a`` itself on
    top of that).  Endpoints are dyadic rationals with denominator bounded by
    the grid implied by ``width_target``, which keeps coefficient sizes flat
    during deep subdivision.
    """
    a = Interval.make(a)
    w = Fraction(width_target)
    if w <= 0:
        raise DomainError("width_target must be positive")
    if a.lo < 0:
        raise DomainError(f"sqrt of interval with negative part: {a}")
    # grid g with 4/g <= width_target, so each endpoint sits within 2/g of truth
    g = 1 << max(1, (4 * w.denominator // w.numerator).bit_length())
    return Interval(sqrt_lower(a.lo, g), sqrt_upper(a.hi, g))
