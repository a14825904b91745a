"""Command line front end.

Subcommands: coeffs, certify, asymptotic, tail, c0, sweep, radial, expand,
replay.  Exit codes: 0 on success/CERTIFIED, 2 on REFUTED, 3 on
INCONCLUSIVE, 1 on usage or domain errors.  All artifacts are written
atomically and contain no timing data, so byte-identical reruns are
reproducible regardless of LEC_WORKERS.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__, asymptotic, certifier, coefficients, radial
from .exactnum import DomainError, rat_from_text, rat_to_text
from .sympoly import ParseError, parse, poly_to_json

VERDICT_EXIT = {"CERTIFIED": 0, "REFUTED": 2, "INCONCLUSIVE": 3}


def _rat(text: str) -> Fraction:
    try:
        return rat_from_text(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _write_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=1)
    if out:
        _write_atomic(out, text)
        print(f"wrote {out}", file=sys.stderr)
    else:
        print(text)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lecert", description=__doc__)
    ap.add_argument("--version", action="version", version=f"lecert {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", help="print all estimate coefficients at a point")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--d1", type=_rat, required=True)
    c.add_argument("--d2", type=_rat, required=True)
    c.add_argument("--scheme", choices=("I", "II", "auto"), default="auto")
    c.add_argument("--eps0", type=_rat, default=Fraction(0))
    c.add_argument("--width", type=_rat, default=Fraction(1, 2**64))
    c.add_argument("--out")

    c = sub.add_parser("certify", help="certify the positivity conditions at one n")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--scheme", choices=("I", "II", "auto"), default="auto")
    c.add_argument("--c0", type=_rat, default=Fraction(4))
    c.add_argument("--tau", type=_rat, default=certifier.DEFAULT_TAU)
    c.add_argument("--depth", type=int, default=certifier.DEFAULT_DEPTH_CAP)
    c.add_argument("--out")

    c = sub.add_parser("asymptotic", help="derive a large-n decomposition")
    c.add_argument("--variant", choices=("case2", "c04"), required=True)
    c.add_argument("--emit", help="output path for the decomposition JSON")
    c.add_argument("--bounds", action="store_true",
                   help="also certify the residual lower bounds (c04 only)")

    c = sub.add_parser("tail", help="certify the closing tail inequality")
    c.add_argument("--nmin", type=int, default=35)
    c.add_argument("--out")

    c = sub.add_parser("c0", help="explicit constants for a general region constant")
    c.add_argument("--value", type=_rat, required=True)
    c.add_argument("--out")

    c = sub.add_parser("sweep", help="full verification sweep")
    c.add_argument("--c0", type=_rat, default=Fraction(4))
    c.add_argument("--tau", type=_rat, default=certifier.DEFAULT_TAU)
    c.add_argument("--depth", type=int, default=certifier.DEFAULT_DEPTH_CAP)
    c.add_argument("--nmin", type=int, default=35)
    c.add_argument("--out-dir", default="sweep-out")

    c = sub.add_parser("radial", help="radial shooting exploration")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", type=_rat, required=True)
    c.add_argument("--q", type=_rat, required=True)
    c.add_argument("--u0", type=float, default=1.0)
    c.add_argument("--v0", type=float, default=1.0)
    c.add_argument("--rmax", type=float, default=50.0)
    c.add_argument("--rel-tol", type=float, default=radial.DEFAULT_REL_TOL)
    c.add_argument("--abs-tol", type=float, default=radial.DEFAULT_ABS_TOL)
    c.add_argument("--csv")
    c.add_argument("--svg")

    c = sub.add_parser("expand", help="canonical JSON form of a polynomial expression")
    c.add_argument("expr", help='e.g. "(n - 2*d1)*(n + 2*d1)"')
    c.add_argument("--out")

    c = sub.add_parser("replay", help="re-execute a recorded certificate")
    c.add_argument("path")
    return ap


def _cmd_coeffs(args) -> int:
    scheme = args.scheme
    if scheme == "auto":
        scheme = "II" if 5 <= args.n <= 12 else "I"
    if scheme == "I":
        cs = coefficients.scheme1(args.n, args.d1, args.d2)
    else:
        cs = coefficients.scheme2(args.n, args.d1, args.d2, eps0=args.eps0, width=args.width)
    _emit(cs.to_json_dict(), args.out)
    return 0


def _cmd_certify(args) -> int:
    cert = certifier.certify_conditions(args.n, args.scheme, c0=args.c0,
                                        tau=args.tau, depth_cap=args.depth)
    if args.out:
        certifier.write_certificate(cert, args.out)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        print(cert.to_json())
    print(f"verdict: {cert.verdict}", file=sys.stderr)
    return VERDICT_EXIT[cert.verdict]


def _cmd_asymptotic(args) -> int:
    dec = asymptotic.derive_decomposition(args.variant)
    _emit(dec.to_json_dict(), args.emit)
    if args.bounds:
        if args.variant != "c04":
            print("--bounds applies to the c04 variant", file=sys.stderr)
            return 1
        certs = asymptotic.verify_Ri_bounds(dec)
        verdicts = {f"R{i}": c.verdict for i, c in sorted(certs.items(), reverse=True)}
        print(json.dumps(verdicts, indent=1), file=sys.stderr)
        worst = certifier._combine_verdicts(verdicts.values())
        return VERDICT_EXIT[worst]
    return 0


def _cmd_tail(args) -> int:
    cert = asymptotic.verify_tail(args.nmin)
    if args.out:
        certifier.write_certificate(cert, args.out)
    print(f"tail at n >= {args.nmin}: {cert.verdict} "
          f"(exact value at {args.nmin}: {cert.inputs['value_at_n_min']})", file=sys.stderr)
    return VERDICT_EXIT[cert.verdict]


def _cmd_c0(args) -> int:
    rep = asymptotic.verify_c0_asymptotic(args.value)
    _emit(rep, args.out)
    return VERDICT_EXIT[rep["verdict"]]


def _cmd_sweep(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    t_start = time.time()
    report = {
        "schema": "lec/1",
        "tool_version": __version__,
        "inputs": {
            "c0": rat_to_text(args.c0),
            "tau": rat_to_text(args.tau),
            "depth_cap": args.depth,
            "n_min_tail": args.nmin,
        },
        "tasks": {},
    }
    verdicts = []

    def record(name: str, verdict: str, path: str | None = None, extra=None):
        entry = {"verdict": verdict}
        if path:
            entry["certificate"] = os.path.basename(path)
        if extra:
            entry.update(extra)
        report["tasks"][name] = entry
        verdicts.append(verdict)
        print(f"  {name}: {verdict}", file=sys.stderr)

    # symbolic reproduction
    try:
        dec2 = asymptotic.derive_decomposition("case2")
        dec4 = asymptotic.derive_decomposition("c04")
        p_ok = dec2.mid_num == asymptotic.printed_P()
        t_ok = dec4.mid_num == asymptotic.printed_T()
        record("derivation/printed-P-match", "CERTIFIED" if p_ok else "REFUTED")
        record("derivation/printed-T-match", "CERTIFIED" if t_ok else "REFUTED")
    except asymptotic.ConsistencyError as exc:
        record("derivation", "REFUTED", extra={"error": str(exc)})
        dec4 = None

    # per-n condition certificates
    for n in range(5, 13):
        path = os.path.join(args.out_dir, f"conditions-n{n}-II.json")
        cert = certifier.certify_conditions(n, "II", c0=args.c0, tau=args.tau,
                                            depth_cap=args.depth)
        certifier.write_certificate(cert, path)
        record(f"conditions/n={n}/scheme-II", cert.verdict, path,
               extra={"eps0": cert.inputs.get("eps0")})
    for n in range(13, args.nmin + 1):
        path = os.path.join(args.out_dir, f"conditions-n{n}-I.json")
        cert = certifier.certify_conditions(n, "I", c0=args.c0, tau=args.tau,
                                            depth_cap=args.depth)
        certifier.write_certificate(cert, path)
        record(f"conditions/n={n}/scheme-I", cert.verdict, path)

    # residual and middle bound suite
    if dec4 is not None:
        for i, cert in sorted(asymptotic.verify_Ri_bounds(dec4, tau=args.tau,
                                                          depth_cap=args.depth).items(),
                              reverse=True):
            path = os.path.join(args.out_dir, f"residual-R{i}.json")
            certifier.write_certificate(cert, path)
            record(f"bounds/R{i}", cert.verdict, path)
    for label, cert in asymptotic.verify_P_T_bounds(tau=args.tau, depth_cap=args.depth).items():
        path = os.path.join(args.out_dir, f"mid-{label}.json")
        certifier.write_certificate(cert, path)
        record(f"bounds/{label}+8(d1+3d2)", cert.verdict, path)
    a34 = asymptotic.verify_A3A4_bounds(tau=args.tau, depth_cap=args.depth)
    for label, cert in a34["tail"].items():
        path = os.path.join(args.out_dir, f"quartic-{label}-tail.json")
        certifier.write_certificate(cert, path)
        record(f"bounds/{label}-tail", cert.verdict, path)
    sweep_verdicts = [v for d in a34["sweep"].values() for v in d.values()]
    record("bounds/A3A4-integer-sweep",
           certifier._combine_verdicts(sweep_verdicts),
           extra={"range": "[2, 200]"})

    # closing tail
    tail_cert = asymptotic.verify_tail(args.nmin)
    path = os.path.join(args.out_dir, "tail.json")
    certifier.write_certificate(tail_cert, path)
    record(f"tail/n>={args.nmin}", tail_cert.verdict, path,
           extra={"value_at_n_min": tail_cert.inputs["value_at_n_min"]})

    report["verdict"] = certifier._combine_verdicts(verdicts)
    blob = json.dumps(report["inputs"], sort_keys=True, separators=(",", ":"))
    report["input_hash"] = hashlib.sha256(blob.encode()).hexdigest()
    out_path = os.path.join(args.out_dir, "sweep-report.json")
    _write_atomic(out_path, json.dumps(report, indent=1))
    print(f"sweep verdict: {report['verdict']} "
          f"({time.time() - t_start:.1f}s, report: {out_path})", file=sys.stderr)
    return VERDICT_EXIT[report["verdict"]]


def _cmd_radial(args) -> int:
    traj = radial.shoot(args.n, args.p, args.q, args.u0, args.v0, args.rmax,
                        rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    info = radial.classify(args.n, args.p, args.q)
    summary = {
        "n": args.n, "p": rat_to_text(args.p), "q": rat_to_text(args.q),
        "class": info["class"],
        "gap": rat_to_text(info["gap"]),
        "in_working_region": info["in_working_region"],
        "first_zero": (
            {"component": traj.first_zero[0], "radius": traj.first_zero[1]}
            if traj.first_zero else None
        ),
        "r_end": float(traj.r[-1]),
    }
    print(json.dumps(summary, indent=1))
    if args.csv:
        radial.save_csv(traj, args.csv)
        print(f"wrote {args.csv}", file=sys.stderr)
    if args.svg:
        radial.save_svg(traj, args.svg)
        print(f"wrote {args.svg}", file=sys.stderr)
    return 0


def _cmd_expand(args) -> int:
    poly = parse(args.expr)
    if args.out:
        _write_atomic(args.out, poly_to_json(poly))
    else:
        print(poly_to_json(poly))
    return 0


def _cmd_replay(args) -> int:
    with open(args.path) as fh:
        obj = json.load(fh)
    result = certifier.replay_certificate(obj)
    if not result["hash_ok"]:
        print("warning: input-hash mismatch (inputs were altered after issuing)",
              file=sys.stderr)
    if result["ok"]:
        print(f"replay confirmed {result['leaves']} leaves", file=sys.stderr)
        return 0 if result["hash_ok"] else 3
    print(json.dumps(result["mismatches"][:20], indent=1), file=sys.stderr)
    print(f"replay found {len(result['mismatches'])} mismatching leaves", file=sys.stderr)
    return 2


_HANDLERS = {
    "coeffs": _cmd_coeffs,
    "certify": _cmd_certify,
    "asymptotic": _cmd_asymptotic,
    "tail": _cmd_tail,
    "c0": _cmd_c0,
    "sweep": _cmd_sweep,
    "radial": _cmd_radial,
    "expand": _cmd_expand,
    "replay": _cmd_replay,
}


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return _HANDLERS[args.command](args)
    except (DomainError, ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
