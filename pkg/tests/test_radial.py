"""Radial shooting explorer."""

from fractions import Fraction as F

import numpy as np
import pytest

from lecert.radial import (check_comparison, classify, critical_bubble,
                           monotone_flux_residual, rescale_check, save_csv, save_svg,
                           scaling_exponents, shoot)


@pytest.fixture(scope="module")
def sym_shot():
    return shoot(5, 2, 2, 1.0, 1.0, r_max=1000.0)


def test_critical_bubble_profile():
    traj = shoot(3, 5, 5, 1.0, 1.0, r_max=10.0)
    assert traj.first_zero is None
    rs = np.linspace(0.02, 10.0, 400)
    ref = critical_bubble(3, rs)
    err = max(abs(traj.sample(r)[0] - ref[i]) / ref[i] for i, r in enumerate(rs))
    assert err <= 1e-6


def test_single_equation_symmetry(sym_shot):
    # p = q and u0 = v0: the two components coincide exactly
    assert float(np.max(np.abs(sym_shot.u - sym_shot.v))) == 0.0


def test_component_swap_symmetry():
    a = shoot(5, 3, 2, 1.0, 0.8, r_max=30.0)
    b = shoot(5, 2, 3, 0.8, 1.0, r_max=30.0)
    rs = np.linspace(0.01, min(a.r[-1], b.r[-1]) * 0.99, 50)
    for r in rs:
        ua, _, va, _ = a.sample(r)
        ub, _, vb, _ = b.sample(r)
        assert abs(ua - vb) < 1e-8 and abs(va - ub) < 1e-8


def test_subcritical_first_zero(sym_shot):
    assert sym_shot.first_zero is not None
    comp, r = sym_shot.first_zero
    assert comp in ("u", "v") and 0 < r < 1000


def test_radius_monotone_and_regular_start(sym_shot):
    assert np.all(np.diff(sym_shot.r) > 0)
    u0, du0, v0, dv0 = sym_shot.sample(0.0)
    assert abs(du0) < 1e-9 and abs(dv0) < 1e-9


def test_monotone_while_positive(sym_shot):
    mask = (sym_shot.u > 0) & (sym_shot.v > 0) & (sym_shot.r > 1e-4)
    assert np.all(sym_shot.du[mask] < 0)
    assert np.all(sym_shot.dv[mask] < 0)


def test_classify_examples():
    c = classify(5, 2, 2)
    assert c["class"] == "subcritical" and not c["in_working_region"]
    assert classify(3, 5, 5)["class"] == "critical"
    c = classify(13, F(15, 11), 1)
    assert c["class"] == "subcritical"
    assert c["gap"] == F(1, 13)
    assert c["in_working_region"]   # 1/13 >= 4/169


def test_comparison_reports(sym_shot):
    rep = check_comparison(sym_shot)
    assert rep["max_excess"] <= rep["tolerance"]
    assert rep["holds_at_start"]
    # ordered initial data (p > q), inequality propagates along the shot
    traj = shoot(5, 3, 2, 1.0, 0.9, r_max=20.0)
    rep = check_comparison(traj)
    assert rep["holds_at_start"] and not rep["violated_beyond_tolerance"]
    # negative control: violated at the start, tool reports it
    bad = shoot(5, 3, 2, 0.5, 2.0, r_max=5.0)
    rep = check_comparison(bad)
    assert not rep["holds_at_start"]


def test_scaling_exponents_values():
    assert scaling_exponents(2, 2) == (2, 2)
    a, b = scaling_exponents(F(15, 11), 1)
    assert a == 2 * (F(15, 11) + 1) / (F(15, 11) - 1)
    with pytest.raises(ValueError):
        scaling_exponents(1, 1)


def test_rescale_identity(sym_shot):
    rep = rescale_check(sym_shot, 1)
    assert rep["max_rel_deviation"] <= 10 * sym_shot.rel_tol


@pytest.mark.parametrize("R", [F(1, 2), 2, 8])
def test_rescale_invariance(sym_shot, R):
    rep = rescale_check(sym_shot, R)
    assert rep["max_rel_deviation"] <= 10 * sym_shot.rel_tol
    assert rep["first_zero_component_match"]
    assert rep["first_zero_covariance_error"] <= 1e-7


def test_flux_identity(sym_shot):
    assert monotone_flux_residual(sym_shot) <= 1e-7


def test_tolerance_convergence():
    loose = shoot(4, 2, 2, 1.0, 1.0, r_max=100.0, rel_tol=1e-8, abs_tol=1e-10)
    tight = shoot(4, 2, 2, 1.0, 1.0, r_max=100.0, rel_tol=4e-9, abs_tol=5e-11)
    assert loose.first_zero and tight.first_zero
    assert abs(loose.first_zero[1] - tight.first_zero[1]) <= 1e-6


def test_outputs(tmp_path, sym_shot):
    csv_path = tmp_path / "t.csv"
    svg_path = tmp_path / "t.svg"
    save_csv(sym_shot, str(csv_path))
    header = csv_path.read_text().splitlines()[0]
    assert header == "r,u,du,v,dv"
    save_svg(sym_shot, str(svg_path))
    assert svg_path.read_text().lstrip().startswith("<?xml")


def test_input_validation():
    with pytest.raises(ValueError):
        shoot(5, 2, 2, -1.0, 1.0)
    with pytest.raises(ValueError):
        shoot(5, 2, 2, 1.0, 1.0, r_max=-1)
    with pytest.raises(ValueError):
        classify(5, 0, 2)
