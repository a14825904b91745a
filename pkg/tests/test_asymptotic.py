"""Large-n decomposition pipeline, residual bounds, tail inequality."""

import random
from fractions import Fraction as F

import pytest

from lecert.asymptotic import (RESIDUAL_BOUND_CONSTANTS, A3_LOWER_BOUND, A4_LOWER_BOUND,
                               printed_A3, printed_A4, printed_P, printed_T,
                               tail_polynomial, tail_value, verify_A3A4_bounds,
                               verify_Ri_bounds, verify_c0_asymptotic, verify_tail)
from lecert.certifier import replay_certificate
from lecert.coefficients import scheme1_symbolic
from lecert.sympoly import PolyExpr, RatFunc

N, D1, D2 = PolyExpr.var("n"), PolyExpr.var("d1"), PolyExpr.var("d2")


def test_A3_reference_values():
    a3 = printed_A3()
    # 4*2^4 + 4*(2-0-0)*2^3 = 64 + 64 at the origin slice
    assert a3.eval(2, 0, 0) == 128
    # collected coefficients match the displayed quartic
    collected = dict(a3.collect_n())
    assert collected[4] == PolyExpr.const(4)
    assert collected[3] == 8 - 12 * D1 - 4 * D2
    assert collected[2] == -44 * D1 + 7 * D1**2 + 12 * D2 + 10 * D1 * D2 - D2**2
    assert collected[1] == -4 * D1 + 54 * D1**2 + 4 * D2 - 20 * D1 * D2 - 2 * D2**2
    assert collected[0] == 8 * D1 * (D1 - D2)


def test_decomposition_matches_printed_forms(dec_case2, dec_c04):
    assert dec_case2.mid_num == printed_P()
    assert dec_c04.mid_num == printed_T()
    assert dec_case2.A3 == printed_A3() and dec_case2.A4 == printed_A4()
    assert dec_c04.A3 == printed_A3() and dec_c04.A4 == printed_A4()


def test_decomposition_degrees(dec_case2, dec_c04):
    assert max(i for i, _ in dec_case2.residual_coeffs) <= 17
    assert max(i for i, _ in dec_c04.residual_coeffs) <= 14
    assert dec_case2.leading_num == 4 * (2 - D1 - D2) * (D1 + 3 * D2)


def test_T_equals_P_minus_2L(dec_case2, dec_c04):
    L = 4 * (2 - D1 - D2) * (D1 + 3 * D2)
    assert dec_c04.mid_num == dec_case2.mid_num - 2 * L


def test_residuals_have_integer_coefficients(dec_case2, dec_c04):
    for dec in (dec_case2, dec_c04):
        for i, c in dec.residual_coeffs:
            for coef in c.terms.values():
                assert coef.denominator == 1, (dec.variant, i)


def test_decomposition_point_reassembly(dec_case2, dec_c04):
    # numeric cross-check at random points: leading + mid + residual == FF
    sym = scheme1_symbolic()
    ff = sym["FF"]
    rng = random.Random(17)
    den_doc = PolyExpr.const(1)
    for f, k in dec_c04.residual_den_factors:
        den_doc = den_doc * f**k
    for _ in range(12):
        n = rng.randrange(6, 50)
        d2 = F(rng.randrange(0, 12), 16)
        d1 = d2 + F(rng.randrange(1, 12), 16)
        if 2 * d1 >= n or d1 + d2 >= 2:
            continue
        target = ff.eval(n, d1, d2)
        # case2 variant
        L = dec_case2.leading_num.eval(n, d1, d2)
        P = dec_case2.mid_num.eval(n, d1, d2)
        S = dec_case2.residual_poly().eval(n, d1, d2)
        den = den_doc.eval(n, d1, d2)
        assert L / F(n) ** 2 + P / F(n) ** 3 + S / (den * F(n) ** 3) == target
        # c04 variant
        T = dec_c04.mid_num.eval(n, d1, d2)
        S4 = dec_c04.residual_poly().eval(n, d1, d2)
        m = F(n - 1)
        assert L / m**2 + T / m**3 + S4 / den == target


def test_Q17_serialization_roundtrip(dec_case2):
    from lecert.sympoly import parse, poly_from_json, poly_to_json, serialize
    q17 = dec_case2.coefficient(17)
    assert not q17.is_zero()
    assert parse(serialize(q17)) == q17
    assert poly_from_json(poly_to_json(q17)) == q17


def test_Ri_bounds_all_certified(dec_c04):
    certs = verify_Ri_bounds(dec_c04)
    assert set(certs) == set(RESIDUAL_BOUND_CONSTANTS)
    for i, cert in certs.items():
        assert cert.verdict == "CERTIFIED", i


def test_Ri_negative_control(dec_c04):
    # R7 with constant 0: the bound R7/32 >= 0 must not certify
    certs = verify_Ri_bounds(dec_c04, constants={7: 0})
    assert certs[7].verdict in ("REFUTED", "INCONCLUSIVE")


def test_A3A4_point_sanity():
    # A3(2,1,0) = -8 dominates the bound value 4*16-16*8-60*4-2 = -306
    assert printed_A3().eval(2, 1, 0) == -8
    assert A3_LOWER_BOUND.eval(2, 0, 0) == -306
    assert printed_A3().eval(2, 1, 0) >= A3_LOWER_BOUND.eval(2, 0, 0)
    diff0 = (printed_A3() - A3_LOWER_BOUND).eval_partial_n(7)
    assert diff0.eval(0, 0, 0) > 0


def test_A3A4_negative_control():
    # tightening the n^2 coefficient of the A3 bound from -60 to -7 must fail
    from lecert.certifier import certify_poly_bound, wide_triangle_region
    bad_bound = A3_LOWER_BOUND + 53 * N**2  # -60 n^2 -> -7 n^2
    diff = (printed_A3() - bad_bound).eval_partial_n(200)
    cert = certify_poly_bound(diff, PolyExpr(), wide_triangle_region(), depth_cap=10)
    assert cert.verdict in ("REFUTED", "INCONCLUSIVE")


@pytest.mark.slow
def test_A3A4_bounds_suite():
    rep = verify_A3A4_bounds()
    assert rep["verdict"] == "CERTIFIED"
    assert all(v == "CERTIFIED" for d in rep["sweep"].values() for v in d.values())
    assert rep["tail"]["A3"].verdict == "CERTIFIED"
    assert rep["tail"]["A4"].verdict == "CERTIFIED"


def test_tail_value_exact():
    v35 = tail_value(35)
    assert v35 == F(22882117634145176956, 14526985843818412965)
    assert v35 > 0
    assert tail_value(34) < 0   # the threshold is sharp
    assert tail_value(13) < 0   # below threshold: negative, reported not asserted


def test_tail_certificate():
    cert = verify_tail(35)
    assert cert.verdict == "CERTIFIED"
    assert cert.inputs["route"] == "shifted-coefficients"
    assert all(r.verdict == "CERTIFIED" for r in cert.inequalities)


def test_tail_monotone_at_next_integer():
    assert verify_tail(36).verdict == "CERTIFIED"


def test_tail_replay():
    cert = verify_tail(35)
    rep = replay_certificate(cert.to_json_dict())
    assert rep["ok"] and rep["hash_ok"]


def test_tail_polynomial_consistency():
    # the cleared polynomial over its factored denominator equals the display
    pt, fac = tail_polynomial()
    for n in (35, 50, 13):
        den = F(1)
        for f, k in fac:
            den *= f.eval(n, 0, 0) ** k
        assert pt.eval(n, 0, 0) / den == tail_value(n)


@pytest.mark.slow
def test_c0_asymptotic_c0_4(dec_case2):
    rep = verify_c0_asymptotic(F(4))
    assert rep["verdict"] == "CERTIFIED"
    assert rep["N_star"] >= rep["n1_star"] >= 13
    assert all(r["verdict"] == "CERTIFIED" for r in rep["residual_bounds"])
    assert "[13, " in rep["consistency"]


@pytest.mark.slow
def test_c0_asymptotic_c0_3(dec_case2):
    rep = verify_c0_asymptotic(F(3))
    assert rep["verdict"] == "CERTIFIED"
    assert rep["N_star"] >= rep["n1_star"] >= 13
    # weaker region constant: the admissible threshold cannot shrink
    rep4 = verify_c0_asymptotic(F(4))
    assert rep["N_star"] >= rep4["N_star"]


def test_c0_rejects_c0_2():
    from lecert.exactnum import DomainError
    with pytest.raises(DomainError):
        verify_c0_asymptotic(F(2))
