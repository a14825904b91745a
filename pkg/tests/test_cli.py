"""Command line surface: exit codes, artifacts, replay."""

import json
import os

import pytest

from lecert.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expand(capsys):
    code, out, _ = run(capsys, "expand", "(n - 2*d1)*(n + 2*d1)")
    assert code == 0
    obj = json.loads(out)
    assert obj == {"vars": ["n", "d1", "d2"],
                   "terms": [{"e": [2, 0, 0], "c": "1"}, {"e": [0, 2, 0], "c": "-4"}]}


def test_expand_parse_error(capsys):
    code, _, err = run(capsys, "expand", "n +* oops")
    assert code == 1 and "error" in err


def test_unknown_flag_usage_error(capsys):
    assert main(["certify", "--does-not-exist"]) == 1


def test_coeffs_scheme_auto(capsys):
    code, out, _ = run(capsys, "coeffs", "--n", "13", "--d1", "1", "--d2", "0")
    assert code == 0
    obj = json.loads(out)
    assert obj["scheme"] == "I"
    assert obj["values"]["A1A2_minus_pq"] == "361287835/12386358996"
    code, out, _ = run(capsys, "coeffs", "--n", "7", "--d1", "1", "--d2", "1/4")
    assert code == 0
    assert json.loads(out)["scheme"] == "II"


def test_coeffs_rejects_floats(capsys):
    assert main(["coeffs", "--n", "13", "--d1", "0.5", "--d2", "0"]) == 1


def test_certify_and_replay_cycle(tmp_path, capsys):
    cert_path = str(tmp_path / "c13.json")
    code, _, err = run(capsys, "certify", "--n", "13", "--scheme", "I",
                       "--c0", "4", "--tau", "2^-10", "--out", cert_path)
    assert code == 0 and "CERTIFIED" in err
    assert os.path.exists(cert_path)
    code, _, err = run(capsys, "replay", cert_path)
    assert code == 0 and "confirmed" in err

    obj = json.load(open(cert_path))
    obj["tree"][3]["verdict"] = "depth-exhausted"
    tampered = str(tmp_path / "bad.json")
    json.dump(obj, open(tampered, "w"))
    code, _, err = run(capsys, "replay", tampered)
    assert code == 2

    obj = json.load(open(cert_path))
    obj["inputs"]["tau"] = "1/64"
    warned = str(tmp_path / "warn.json")
    json.dump(obj, open(warned, "w"))
    code, _, err = run(capsys, "replay", warned)
    assert "input-hash mismatch" in err
    assert code == 3


def test_tail_exit_code(capsys):
    code, _, err = run(capsys, "tail", "--nmin", "35")
    assert code == 0 and "CERTIFIED" in err


def test_radial_cli(tmp_path, capsys):
    csv = str(tmp_path / "r.csv")
    code, out, _ = run(capsys, "radial", "--n", "5", "--p", "2", "--q", "2",
                       "--rmax", "30", "--csv", csv)
    assert code == 0
    obj = json.loads(out)
    assert obj["class"] == "subcritical"
    assert obj["first_zero"]["radius"] == pytest.approx(9.9222, rel=1e-3)
    assert open(csv).readline().strip() == "r,u,du,v,dv"


def test_asymptotic_emit(tmp_path, capsys, dec_case2):
    path = str(tmp_path / "dec.json")
    code, _, err = run(capsys, "asymptotic", "--variant", "case2", "--emit", path)
    assert code == 0
    obj = json.load(open(path))
    assert obj["variant"] == "case2"
    assert obj["base"] == "n"
    assert {f["mult"] for f in obj["residual"]["den_factors"]} >= {1, 2, 3}


def test_version(capsys):
    assert main(["--version"]) == 0
