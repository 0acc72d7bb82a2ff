"""Command-line entry point.

Exit codes: 0 success, 2 bad usage or parameters, 3 a verification failed.
Reports go to --out, else to $TRIPARTITE_LHV_OUT/<command>.<ext> when that
variable is set, else to stdout. Files written to disk get a sidecar
``<file>.meta.json`` carrying the timestamp so the report itself stays
byte-identical across runs.
"""
from __future__ import annotations

import argparse
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from . import entanglement as ent
from .extensions import extension_for_p, max_psd_c
from .lhv import agreement_test
from .nogo import four_qubit_mismatch_report, qutrit_inconsistency_report
from .sampling import moment_oracle_check
from .states import family_state, invariance_error
from .tensor import pauli_expand
from .verify import run_all, to_json

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAILED = 3
OUT_ENV = "TRIPARTITE_LHV_OUT"


def _emit(text: str, args, default_name: str) -> None:
    path = args.out
    if path is None and os.environ.get(OUT_ENV):
        path = str(Path(os.environ[OUT_ENV]) / default_name)
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text if text.endswith("\n") else text + "\n")
    meta = {
        "created": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
        "argv": sys.argv[1:],
    }
    Path(str(out) + ".meta.json").write_text(to_json(meta) + "\n")


def cmd_state(args) -> int:
    rho = family_state(args.n, args.c, args.twirled)
    inv_err = invariance_error(rho, trials=20, seed=args.seed)
    payload = {
        "n": args.n,
        "c": args.c,
        "twirled": args.twirled,
        **rho.to_json_dict(),
        "pauli": pauli_expand(rho, tol=1e-14),
        "min_eigenvalue": rho.min_eigenvalue(),
        "un_invariant": inv_err <= args.tol,
        "un_invariance_error": inv_err,
    }
    _emit(to_json(payload), args, f"state_n{args.n}.json")
    return EXIT_OK


def cmd_lhv_test(args) -> int:
    report = agreement_test(args.n, args.c, args.settings, args.samples, args.seed, threads=args.threads)
    _emit(to_json(report), args, f"lhv_test_n{args.n}.json")
    return EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_entanglement(args) -> int:
    report = ent.entanglement_report(args.c)
    expected_verdict = "GENUINE" if args.c > ent.GENUINE_C_THRESHOLD else "INCONCLUSIVE"
    dist = report["distillability"]
    ok = (abs(report["verdict"]["r1"] - report["expected_r1"]) <= 1e-12
          and report["verdict"]["verdict"] == expected_verdict
          and dist["ab_ac_distillable"] == dist["expected_ab_ac_distillable"]
          and dist["bc_separable"])
    report["consistent"] = ok
    _emit(to_json(report), args, "entanglement.json")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_region(args) -> int:
    if args.format == "csv":
        _emit(ent.region_csv(args.points), args, "region.csv")
    else:
        region = ent.bisep_region(args.points)
        payload = {
            "disks": [{"a": d.a, "b": d.b, "rhs": d.rhs, "angle_deg": d.angle_deg} for d in region.disks],
            "hull": region.hull,
            "bound": ent.BISEP_R1_BOUND,
            "markers": [{"kind": k, "name": n, "r1": p.r1, "r2": p.r2} for k, n, p in ent.fig2_markers()],
        }
        _emit(to_json(payload), args, "region.json")
    return EXIT_OK


def cmd_extension(args) -> int:
    cert = extension_for_p(args.n, args.p, args.twirled)
    payload = cert.to_dict()
    payload["max_psd_c"] = max_psd_c(args.n, args.twirled)
    _emit(to_json(payload), args, f"extension_n{args.n}.json")
    return EXIT_OK if cert.valid else EXIT_FAILED


def cmd_nogo(args) -> int:
    if args.which == "fourqubit":
        report = four_qubit_mismatch_report()
        ok = report["mismatch"]
    else:
        report = qutrit_inconsistency_report(args.samples, args.seed, args.threads)
        ok = report["gap_sigma"] >= 5
    _emit(to_json(report), args, f"nogo_{args.which}.json")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_moments(args) -> int:
    report = moment_oracle_check(seed=args.seed)
    _emit(to_json(report), args, "moments.json")
    return EXIT_OK if report["max_quadrature_deviation"] <= 1e-12 else EXIT_FAILED


def cmd_verify_all(args) -> int:
    results = run_all(echo=lambda line: print(line, file=sys.stderr))
    payload = [{"number": r.number, "name": r.name, "passed": r.passed, "values": r.values} for r in results]
    _emit(to_json(payload), args, "verify_all.json")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tripartite-lhv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout or $%s)" % OUT_ENV)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", parents=[common], help="build a family state")
    p.add_argument("--n", type=int, default=3, choices=(2, 3, 4, 5))
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--twirled", action="store_true")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("lhv-test", parents=[common], help="model vs quantum agreement")
    p.add_argument("--n", type=int, default=3, choices=(2, 3, 4, 5))
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--settings", type=_positive_int, default=100)
    p.add_argument("--samples", type=_positive_int, default=1_000_000)
    p.set_defaults(func=cmd_lhv_test)

    p = sub.add_parser("entanglement", parents=[common], help="genuine entanglement and distillability")
    p.add_argument("--c", type=float, default=1.0)
    p.set_defaults(func=cmd_entanglement)

    p = sub.add_parser("region", parents=[common], help="biseparable region data")
    p.add_argument("--points", type=int, default=180)
    p.set_defaults(func=cmd_region, format="csv")

    p = sub.add_parser("extension", parents=[common], help="symmetric extension certificate")
    p.add_argument("--n", type=int, default=3, choices=(3, 4, 5))
    p.add_argument("--p", type=float, default=2 / 3)
    p.add_argument("--twirled", action="store_true")
    p.set_defaults(func=cmd_extension)

    p = sub.add_parser("nogo", parents=[common], help="four-qubit and qutrit no-go checks")
    p.add_argument("which", choices=("fourqubit", "qutrit"))
    p.add_argument("--samples", type=_positive_int, default=10_000_000)
    p.set_defaults(func=cmd_nogo)

    p = sub.add_parser("moments", parents=[common], help="sphere moment identities")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("verify-all", parents=[common], help="run the full claim table")
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "region" and "--format" not in (argv if argv is not None else sys.argv[1:]):
        args.format = "csv"
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
