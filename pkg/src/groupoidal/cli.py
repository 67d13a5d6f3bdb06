"""Command line interface.

Exit codes: 0 when every verification row passes, 1 on any mathematical
failure, 2 on configuration or I/O errors.
"""

import argparse
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, harness
from .groupoid import GroupoidError, validate as validate_groupoid
from .measure import MeasureError, is_unimodular
from .repmod import CommutantSolveFailed, RepContext


def _parser():
    ap = argparse.ArgumentParser(
        prog="groupoidal",
        description="Finite measured groupoids: modular data, non-commutative "
        "L^q norms and Hausdorff-Young verification.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check the groupoid axioms of a spec")
    v.add_argument("spec")

    i = sub.add_parser("info", help="print modular data of a spec")
    i.add_argument("spec")

    r = sub.add_parser("verify", help="run the verification suite of a spec")
    r.add_argument("spec")
    r.add_argument("--checks", nargs="+", default=None,
                   help="subset of: plancherel hy proofpath tensor modular oracles")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--tol", type=float, default=None,
                   help="override every per-check tolerance with this value")
    r.add_argument("--report", default=None, help="write the JSON report here")
    r.add_argument("--csv", default=None, help="write the CSV projection here")
    r.add_argument("--jobs", type=int, default=1)

    o = sub.add_parser("oracle", help="run a classical oracle against a spec")
    o.add_argument("kind", choices=("dft", "schatten"))
    o.add_argument("spec")
    return ap


def _load(path, overrides=None):
    spec = harness.load_spec(path)
    if overrides:
        raw = dict(spec.raw)
        raw.update(overrides)
        spec = harness.spec_from_dict(raw)
    return spec


def _cmd_validate(args):
    spec = _load(args.spec)
    mg = harness.build_measured(spec)
    diagnostics = validate_groupoid(mg.groupoid)
    if diagnostics:
        for line in diagnostics:
            print("FAIL:", line)
        return 1
    print("ok: %d arrows, %d units, all groupoid axioms hold"
          % (mg.groupoid.n_arrows, mg.groupoid.n_units))
    return 0


def _cmd_info(args):
    spec = _load(args.spec)
    mg = harness.build_measured(spec)
    g = mg.groupoid
    print("arrows:      %d" % g.n_arrows)
    print("units:       %d" % g.n_units)
    print("unimodular:  %s" % is_unimodular(mg))
    with np.printoptions(precision=6, suppress=True):
        print("delta:       %s" % mg.delta)
        print("nu:          %s" % mg.nu)
        print("nu_inv:      %s" % mg.nu_inv)
    ctx = RepContext(mg)
    try:
        vn = ctx.vn_data()
        print("dim M:       %d" % vn.dim_m)
        print("dim M':      %d" % vn.dim_mprime)
        with np.printoptions(precision=6, suppress=True):
            print("rho diag:    %s" % np.diag(vn.rho).real)
    except CommutantSolveFailed as exc:
        print("dim M/M':    skipped (%s)" % exc)
    return 0


def _cmd_verify(args):
    overrides = {}
    if args.checks is not None:
        overrides["checks"] = args.checks
    if args.seed is not None:
        overrides["seed"] = args.seed
    spec = _load(args.spec, overrides)
    if args.tol is not None:
        raw = dict(spec.raw)
        raw["tol"] = {k: args.tol for k in harness.DEFAULT_TOL}
        spec = harness.spec_from_dict(raw)
    report = harness.run_suite(spec, jobs=args.jobs)
    stamp = datetime.now(timezone.utc).isoformat()
    if args.report:
        harness.emit_report(report, "json", args.report, timestamp=stamp)
    if args.csv:
        harness.emit_report(report, "csv", args.csv)
    agg = report.aggregates
    print("cases: %d  failures: %d  min margin: %.3g  max residual: %.3g"
          % (agg["cases"], agg["failures"], agg["min_margin"], agg["max_residual"]))
    for rec in report.records:
        if not rec["pass"]:
            print("FAIL %s  lhs=%.12g rhs=%.12g margin=%.3g"
                  % (rec["case_id"], rec["lhs"], rec["rhs"], rec["margin"]))
    return 0 if agg["failures"] == 0 else 1


def _cmd_oracle(args):
    spec = _load(args.spec)
    if args.kind == "dft":
        rows = harness.oracle_dft(spec)
    else:
        rows = harness.oracle_schatten(spec)
    failures = sum(1 for r in rows if not r["pass"])
    for r in rows:
        mark = "ok  " if r["pass"] else "FAIL"
        print("%s %-40s p=%-8.5g lhs=%.12g rhs=%.12g"
              % (mark, r["case_id"], r["p"], r["lhs"], r["rhs"]))
    print("%d rows, %d failures" % (len(rows), failures))
    return 0 if failures == 0 else 1


def main(argv=None):
    args = _parser().parse_args(argv)
    handlers = {
        "validate": _cmd_validate,
        "info": _cmd_info,
        "verify": _cmd_verify,
        "oracle": _cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except (harness.HarnessError, GroupoidError, MeasureError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
