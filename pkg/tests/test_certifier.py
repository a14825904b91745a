"""Branch-and-bound certification engine."""

import json
import random
from fractions import Fraction as F

import pytest

from lecert.certifier import (BernsteinEvaluator, Certificate, LinearConstraint, Region,
                              SchemeIISigmaEvaluator, branch_and_bound, case1_region,
                              case2_region, certify_conditions, certify_poly_bound,
                              certify_positive, evaluator_from_json, region_d1d2,
                              replay_certificate, soundness_spotcheck, triangle_region,
                              wide_triangle_region, write_certificate)
from lecert.exactnum import Interval
from lecert.sympoly import PolyExpr

D1, D2 = PolyExpr.var("d1"), PolyExpr.var("d2")
FREE = region_d1d2((0, 2), (0, 2), [], tau=F(1, 1024))


def test_trivial_positive():
    cert = certify_positive(1 + D1 * D2, FREE)
    assert cert.verdict == "CERTIFIED"
    assert cert.stats["boxes"] == 1


def test_linear_on_case1():
    cert = certify_positive(D1 - D2, case1_region())
    assert cert.verdict == "CERTIFIED"


def test_constant_negative_refuted():
    cert = certify_positive(PolyExpr.const(-1), FREE, depth_cap=5)
    assert cert.verdict == "REFUTED"
    leaf = cert.inequalities[0].leaves[0]
    assert leaf.verdict == "counterexample"
    assert leaf.value == "-1"


def test_indefinite_refuted_inside_region():
    # d1 - 1 is negative on part of the region: must refute with an exact witness
    cert = certify_positive(D1 - 1, FREE, depth_cap=8)
    assert cert.verdict == "REFUTED"
    ce = [l for l in cert.inequalities[0].leaves if l.verdict == "counterexample"][0]
    pt = tuple(map(F, ce.point))
    assert F(ce.value) == pt[0] - 1 <= 0


def test_zero_boundary_nonstrict_vs_strict():
    # d1*d2 >= 0 on the quadrant: non-strict certifies, strict cannot
    nonstrict = certify_poly_bound(D1 * D2, PolyExpr(), FREE, depth_cap=6)
    assert nonstrict.verdict == "CERTIFIED"
    strict = certify_positive(D1 * D2, FREE, depth_cap=6)
    assert strict.verdict in ("INCONCLUSIVE", "REFUTED")


def test_clipping_accepts_near_active_constraint():
    # f = d1 - d2 on the shrunk region is >= tau; clipping should certify
    # without needing boxes smaller than tau everywhere
    reg = case1_region(tau=F(1, 2**14))
    cert = certify_positive(D1 - D2, reg, depth_cap=24)
    assert cert.verdict == "CERTIFIED"


def test_region_json_roundtrip():
    reg = case2_region(13, F(4))
    back = Region.from_json(json.loads(json.dumps(reg.to_json())))
    assert back == reg


def test_uncovered_strips_reported():
    reg = case1_region()
    cert = certify_positive(1 + D1, reg)
    assert any("d1" in s or "d2" in s for s in cert.uncovered)


def test_certificate_roundtrip_and_replay(tmp_path):
    cert = certify_positive(D1 - D2, case1_region())
    path = str(tmp_path / "c.json")
    write_certificate(cert, path)
    rep = replay_certificate(path)
    assert rep["ok"] and rep["hash_ok"]
    assert rep["leaves"] == cert.stats["leaves"]


def test_replay_detects_tampered_leaf(tmp_path):
    cert = certify_positive(D1 - D2, case1_region())
    obj = cert.to_json_dict()
    flip = obj["tree"][0]
    flip["verdict"] = ("certified-positive" if flip["verdict"] != "certified-positive"
                       else "depth-exhausted")
    rep = replay_certificate(obj)
    assert not rep["ok"]
    assert rep["mismatches"]


def test_replay_flags_tampered_inputs():
    cert = certify_positive(1 + D1, FREE)
    obj = cert.to_json_dict()
    obj["inputs"]["depth_cap"] = 99
    rep = replay_certificate(obj)
    assert not rep["hash_ok"]


def test_scheme1_conditions_n13():
    cert = certify_conditions(13, "I")
    assert cert.verdict == "CERTIFIED"
    names = {iq.name.split("[")[0] for iq in cert.inequalities}
    assert names == {"mu_r", "mu_s", "delta1", "delta2", "A1", "A2",
                     "A1A2_minus_pq", "margin1_core", "margin2_core"}
    implied = {imp for iq in cert.inequalities for imp in iq.implies}
    for target in ("alpha1>0", "alpha2>0", "beta1>0", "beta2>0",
                   "gamma1>0", "gamma2>0", "beta1*beta2-gamma1*gamma2>0"):
        assert target in implied


def test_scheme2_conditions_n7():
    cert = certify_conditions(7, "II")
    assert cert.verdict == "CERTIFIED"
    assert cert.inputs["eps0"] == "1/1024"
    base = [iq for iq in cert.inequalities if "eps0=0" in iq.name]
    assert all(iq.verdict == "CERTIFIED" for iq in base)
    alphas = [iq for iq in cert.inequalities if iq.name.startswith("alpha")]
    assert len(alphas) == 2 and all("1/1024" in iq.name for iq in alphas)


def test_scheme_auto_selection():
    cert = certify_conditions(6, "auto", depth_cap=20)
    assert cert.inputs["scheme"] == "II"


def test_conditions_rejects_bad_inputs():
    from lecert.exactnum import DomainError
    with pytest.raises(DomainError):
        certify_conditions(13, "I", c0=2)
    with pytest.raises(DomainError):
        certify_conditions(2, "I")


def test_scheme2_evaluator_serialization_roundtrip():
    ev = SchemeIISigmaEvaluator(7, "delta1", F(0))
    back = evaluator_from_json(ev.describe())
    box = (Interval(F(1, 2), F(3, 4)), Interval(F(0), F(1, 8)))
    assert ev.bounds_on(box) == back.bounds_on(box)


def test_soundness_spotcheck_small():
    cert = certify_conditions(13, "I")
    rep = soundness_spotcheck(cert, n_points=360, seed=7)
    assert rep["violations"] == []
    assert rep["checked"] >= 360


def test_workers_do_not_change_output(monkeypatch):
    outs = []
    for w in ("1", "3"):
        monkeypatch.setenv("LEC_WORKERS", w)
        cert = certify_positive(D1 - D2, case1_region(tau=F(1, 32)))
        outs.append(cert.to_json())
    assert outs[0] == outs[1]


def test_verdict_trichotomy_and_exit_codes():
    from lecert.certifier import VERDICT_EXIT
    assert VERDICT_EXIT == {"CERTIFIED": 0, "REFUTED": 2, "INCONCLUSIVE": 3}


def test_monotone_in_tau():
    # certified at tau implies certified at larger tau (smaller region)
    f = D1 - D2
    small = certify_positive(f, case1_region(tau=F(1, 1024)))
    large = certify_positive(f, case1_region(tau=F(1, 128)))
    assert small.verdict == "CERTIFIED"
    assert large.verdict == "CERTIFIED"


def test_poly_bound_examples(dec_case2, dec_c04):
    shift = 8 * (D1 + 3 * D2)
    reg = wide_triangle_region()
    assert certify_poly_bound(dec_case2.mid_num, -shift, reg).verdict == "CERTIFIED"
    assert certify_poly_bound(dec_c04.mid_num, -shift, reg).verdict == "CERTIFIED"
