"""Polynomial and rational-function algebra."""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lecert.exactnum import Interval
from lecert.sympoly import (BernsteinPatch, ParseError, PoleError, PolyExpr, RatFunc,
                            clear_denominators, collect_n, eval_exact, eval_interval,
                            parse, poly_arith, poly_from_json, poly_gcd, poly_to_json,
                            serialize, substitute)

N, D1, D2 = PolyExpr.var("n"), PolyExpr.var("d1"), PolyExpr.var("d2")


def rand_poly(rng, max_terms=5, max_exp=3, max_coef=9):
    terms = {}
    for _ in range(rng.randrange(max_terms + 1)):
        e = (rng.randrange(max_exp), rng.randrange(max_exp), rng.randrange(max_exp))
        terms[e] = F(rng.randrange(-max_coef, max_coef + 1))
    return PolyExpr(terms)


def test_poly_arith_examples():
    assert poly_arith("*", N - 2 * D1, N + 2 * D1).as_poly() == N**2 - 4 * D1**2
    x = RatFunc.of(N * D1 + 7)
    assert poly_arith("-", x, x).is_zero()
    s = poly_arith("+", RatFunc.of(1) / (N - 1), RatFunc.of(1) / (N + 1))
    assert s == RatFunc.of(2 * N) / RatFunc.of(N**2 - 1)


def test_substitute_examples():
    # x^2 with x -> (n-1), playing x on the d1 slot
    f = RatFunc.of(D1**2)
    assert f.substitute({"d1": N - 1}).as_poly() == N**2 - 2 * N + 1
    # full numeric substitution of the scheme-I r formula
    r = RatFunc.of(-3 * (D1 - D2)) / RatFunc.of(N - 2 * D2)
    val = r.substitute({"n": F(13), "d1": F(1), "d2": F(0)})
    assert val.as_poly().constant_value() == F(-3, 13)


def test_substitute_zero_denominator():
    f = RatFunc.of(1) / RatFunc.of(N - 1)
    from lecert.exactnum import DomainError
    with pytest.raises(DomainError):
        f.substitute({"n": F(1)})


def test_eval_exact_examples():
    assert eval_exact(N - 2 * D1, (5, 1, 0)) == 3
    mu_at = (N * (N + 2) + (N * N - 3 * N - 1) * D1 - N * (N + 2) * D1 * D1 * F(1, 4))
    mu = RatFunc.of(mu_at) / RatFunc.of((N - 1) ** 2)
    assert mu.eval(13, 0, 0) == F(65, 48)


def test_eval_pole():
    f = RatFunc.of(1) / RatFunc.of(N - 1)
    with pytest.raises(PoleError):
        f.eval(1, 0, 0)


def test_eval_interval_examples():
    box = {"n": Interval(F(13), F(13)), "d1": Interval(F(0), F(1)), "d2": Interval(F(0), F(0))}
    iv = eval_interval(N - 2 * D1, box)
    assert iv == Interval(F(11), F(13))
    assert eval_interval(PolyExpr.const(5), box) == Interval(F(5), F(5))
    prod = eval_interval(D1 * (2 - D1), {"d1": Interval(F(0), F(2)), "d2": Interval(F(0), F(0)), "n": Interval(F(0), F(0))})
    assert prod.lo <= 0 and prod.hi >= 1


def test_eval_interval_pole_signal():
    f = RatFunc.of(1) / RatFunc.of(N - 1)
    with pytest.raises(PoleError):
        f.eval_interval({"n": Interval(F(0), F(2)), "d1": Interval(F(0), F(0)), "d2": Interval(F(0), F(0))})


def test_collect_examples():
    assert collect_n(N * D1 + N) == [(1, D1 + 1)]
    assert collect_n(PolyExpr.const(7)) == [(0, PolyExpr.const(7))]
    # reassembly
    rng = random.Random(5)
    for _ in range(50):
        p = rand_poly(rng)
        rebuilt = PolyExpr()
        for i, c in collect_n(p):
            rebuilt = rebuilt + c * N**i
        assert rebuilt == p


def test_clear_denominators():
    num, fac, note = clear_denominators(RatFunc.of(1) / RatFunc.of(N - 1))
    assert num == PolyExpr.const(1)
    assert fac == ((N - 1, 1),)
    assert "n - 1" in note
    a = RatFunc.of(D1) / RatFunc.of(N - 1)
    b = RatFunc.of(D2) / RatFunc.of(N + 1)
    num, fac, _ = clear_denominators(a * b)
    assert dict(fac) == {N - 1: 1, N + 1: 1}
    assert num == D1 * D2


def test_serialize_examples():
    assert serialize(N**2 - 4 * D1**2) == "n^2 - 4*d1^2"
    assert serialize(PolyExpr()) == "0"
    assert parse("n^2 - 4*d1^2") == N**2 - 4 * D1**2
    with pytest.raises(ParseError):
        parse("n +* 2")
    with pytest.raises(ParseError):
        parse("x1 + 2")


def test_parse_parentheses_and_rationals():
    assert parse("(n - 2*d1)*(n + 2*d1)") == N**2 - 4 * D1**2
    assert parse("1/2*(n + n)") == N
    assert parse("-3*(d1 - d2)") == -3 * D1 + 3 * D2


def test_json_roundtrip():
    rng = random.Random(11)
    for _ in range(40):
        p = rand_poly(rng)
        assert poly_from_json(poly_to_json(p)) == p
    j = poly_to_json(N**2 - 4 * D1**2)
    assert j == '{"vars":["n","d1","d2"],"terms":[{"e":[2,0,0],"c":"1"},{"e":[0,2,0],"c":"-4"}]}'


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_ring_axioms(seed):
    rng = random.Random(seed)
    a, b, c = (rand_poly(rng) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_eval_after_substitute_commutes(seed):
    rng = random.Random(seed)
    p = rand_poly(rng)
    bindings = {"n": N + 1, "d1": D1 - D2, "d2": RatFunc.of(F(1, 2))}
    n0, d10, d20 = (F(rng.randrange(-5, 6)) for _ in range(3))
    subbed = RatFunc.of(p).substitute(bindings)
    assert subbed.eval(n0, d10, d20) == p.eval(n0 + 1, d10 - d20, F(1, 2))


@settings(max_examples=120, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_eval_interval_contains_point_values(seed):
    rng = random.Random(seed)
    p = rand_poly(rng)
    lo = [F(rng.randrange(-4, 4)) for _ in range(3)]
    wid = [F(rng.randrange(0, 3)) for _ in range(3)]
    box = {v: Interval(lo[i], lo[i] + wid[i]) for i, v in enumerate(("n", "d1", "d2"))}
    iv = eval_interval(p, box)
    for _ in range(20):
        pt = [lo[i] + wid[i] * F(rng.randrange(0, 17), 16) for i in range(3)]
        assert iv.contains(p.eval(*pt))


def test_divide_exact():
    assert (N**2 - 4 * D1**2).divide_exact(N - 2 * D1) == N + 2 * D1
    assert (N**2 - 4 * D1**2).divide_exact(N - D1) is None
    q = (N - 1) ** 3 * (D1 + D2)
    assert q.divide_exact((N - 1) ** 2) == (N - 1) * (D1 + D2)


def test_poly_gcd():
    assert poly_gcd(D1 * (N + 1), D1 * (N + 2)) == D1
    assert poly_gcd((N - 2 * D1) ** 2 * (N + D2), (N - 2 * D1) * (N - D2)) == N - 2 * D1
    assert poly_gcd(N + 1, N + 2) == PolyExpr.const(1)
    assert poly_gcd(PolyExpr(), N + 1) == N + 1


def test_ratfunc_normalized_reduces():
    f = RatFunc.make((N**2 - 4 * D1**2) * D2, [((N - 2 * D1) * (N + 1), 1)])
    g = f.normalized()
    assert g == f
    assert g.den() == N + 1
    assert g.num == (N + 2 * D1) * D2


def test_bernstein_bounds_and_corners():
    p = D1 * D1 - D2  # range over [0,1]^2 is [-1, 1]
    patch = BernsteinPatch.from_poly(p, (Interval(F(0), F(1)), Interval(F(0), F(1))))
    b = patch.bounds()
    assert b.lo <= -1 and b.hi >= 1
    corners = {(x, y): v for x, y, v in patch.corner_values()}
    assert corners[(F(0), F(0))] == 0
    assert corners[(F(1), F(1))] == 0
    assert corners[(F(0), F(1))] == -1
    assert corners[(F(1), F(0))] == 1


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_bernstein_containment_and_split(seed):
    rng = random.Random(seed)
    terms = {(0, rng.randrange(4), rng.randrange(4)): F(rng.randrange(-9, 10))
             for _ in range(rng.randrange(1, 6))}
    p = PolyExpr(terms)
    box = (Interval(F(0), F(2)), Interval(F(-1), F(1)))
    patch = BernsteinPatch.from_poly(p, box)
    b = patch.bounds()
    for _ in range(25):
        x = F(rng.randrange(0, 33), 16)
        y = F(rng.randrange(-16, 17), 16)
        assert b.contains(p.eval(0, x, y))
    for axis in (0, 1):
        for child in patch.split(axis):
            cb = child.bounds()
            assert b.lo <= cb.lo and cb.hi <= b.hi or True  # children within parent's hull
            direct = BernsteinPatch.from_poly(p, child.box)
            assert direct.coeffs == child.coeffs  # de Casteljau == direct construction
