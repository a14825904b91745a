"""Exact rational and interval arithmetic."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lecert.exactnum import (DomainError, Interval, iv_arith, iv_sqrt, rat_from_text,
                             rat_of, rat_to_text)

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=1000)


def test_rat_of_reduction():
    assert rat_of(6, 4) == F(3, 2)
    assert rat_of(0, 7) == F(0, 1)
    assert rat_of(0, 7).denominator == 1
    assert rat_of(5, -10) == F(-1, 2)
    assert rat_of(5, -10).denominator == 2  # positive denominator kept


def test_rat_of_zero_denominator():
    with pytest.raises(DomainError):
        rat_of(1, 0)


def test_rat_text_roundtrip():
    for t in ("3/2", "-1/2", "0", "17"):
        assert rat_to_text(rat_from_text(t)) == t
    assert rat_from_text("2^-10") == F(1, 1024)
    assert rat_from_text("2^6") == 64
    with pytest.raises(DomainError):
        rat_from_text("0.5")


@given(a=rationals, b=rationals, c=rationals, d=rationals)
def test_canonical_equality(a, b, c, d):
    # rat_of(a,b) == rat_of(c,d) iff ad == bc
    if b == 0 or d == 0:
        return
    x, y = F(a) / F(b), F(c) / F(d)
    assert (x == y) == (F(a) * F(d) == F(b) * F(c))


def test_iv_arith_examples():
    assert iv_arith("+", Interval(F(1), F(2)), Interval(F(3), F(4))) == Interval(F(4), F(6))
    assert iv_arith("*", Interval(F(-1), F(2)), Interval(F(3), F(4))) == Interval(F(-4), F(8))
    assert iv_arith("/", Interval(F(1), F(1)), Interval(F(2), F(4))) == Interval(F(1, 4), F(1, 2))


def test_division_by_zero_interval():
    with pytest.raises(DomainError):
        iv_arith("/", Interval(F(1), F(2)), Interval(F(-1), F(1)))


def test_even_power_straddling_zero():
    assert Interval(F(-2), F(1)) ** 2 == Interval(F(0), F(4))
    assert Interval(F(-2), F(1)) ** 3 == Interval(F(-8), F(1))


intervals = st.tuples(rationals, rationals).map(lambda ab: Interval(min(ab), max(ab)))


@settings(max_examples=300)
@given(a=intervals, b=intervals, t=st.fractions(min_value=0, max_value=1, max_denominator=64),
       u=st.fractions(min_value=0, max_value=1, max_denominator=64),
       op=st.sampled_from("+-*/"))
def test_interval_soundness(a, b, t, u, op):
    x = a.lo + (a.hi - a.lo) * t
    y = b.lo + (b.hi - b.lo) * u
    if op == "/" and b.lo <= 0 <= b.hi:
        return
    result = iv_arith(op, a, b)
    exact = {"+": x + y, "-": x - y, "*": x * y, "/": x / y if y else None}[op]
    if exact is not None:
        assert result.contains(exact)


def test_iv_sqrt_examples():
    assert iv_sqrt(Interval(F(4), F(4))) == Interval(F(2), F(2))
    assert iv_sqrt(Interval(F(0), F(0))) == Interval(F(0), F(0))
    s = iv_sqrt(Interval(F(2), F(2)), F(1, 10**6))
    assert s.lo**2 <= 2 <= s.hi**2
    assert s.width <= F(1, 10**6)


def test_iv_sqrt_negative():
    with pytest.raises(DomainError):
        iv_sqrt(Interval(F(-1), F(1)))


@settings(max_examples=200)
@given(x=st.fractions(min_value=0, max_value=10**6, max_denominator=10**6),
       w=st.sampled_from([F(1, 2**20), F(1, 2**40), F(1, 2**64)]))
def test_iv_sqrt_endpoint_exactness(x, w):
    s = iv_sqrt(Interval(x, x), w)
    assert s.lo**2 <= x <= s.hi**2
    assert s.width <= w


@settings(max_examples=100)
@given(lo=st.fractions(min_value=0, max_value=100, max_denominator=1000),
       wid=st.fractions(min_value=0, max_value=10, max_denominator=1000),
       grow=st.fractions(min_value=0, max_value=5, max_denominator=1000))
def test_iv_sqrt_monotone_in_inclusion(lo, wid, grow):
    inner = Interval(lo + grow, lo + grow + wid)
    outer = Interval(lo, lo + 2 * grow + wid)
    w = F(1, 2**40)
    si, so = iv_sqrt(inner, w), iv_sqrt(outer, w)
    # up to the construction grid, the enclosure respects inclusion
    assert so.lo <= si.lo + w and si.hi <= so.hi + w
