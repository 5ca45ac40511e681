"""Command line: build, eval, sweep, verify, norms."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import assembly, harness
from .corpus import NAMES, get_function
from .network_core import evaluate_batch, load, save
from .numeric import PRECISION_ENV, Precision


def _precision(text: str | None, f=None, M: int | None = None) -> Precision:
    """Explicit flag, else the environment variable, else automatic extended bits."""
    text = text if text is not None else os.environ.get(PRECISION_ENV)
    if text is None or str(text).lower() == "auto":
        if f is None:
            return Precision.standard()
        return Precision.extended(assembly.auto_bits(f, M))
    return Precision.parse(text)


def _read_points(spec: str, d: int) -> np.ndarray:
    path = Path(spec)
    if path.exists():
        X = np.loadtxt(path, delimiter=",", ndmin=2)
    else:
        X = np.array([float(v) for v in spec.split(",")]).reshape(-1, d)
    if X.shape[1] != d:
        X = X.reshape(-1, d)
    return X


def cmd_build(args) -> int:
    f = get_function(args.func, d=args.d, a=args.a, q=args.q)
    prec = _precision(args.precision, f, args.M)
    params = assembly.derive_params(f, args.M, prec)
    net = assembly.build_theorem1(f, args.M, prec, params)
    rec = assembly.architecture_record(net, f.d, f.q, args.M)
    info = {"function": f.name, "M": args.M, "precision": prec.label(), **rec,
            "log10_max_weight": net.log10_max_weight(), "flags": params.flags}
    if args.out:
        save(net, args.out)
        info["saved"] = args.out
    print(json.dumps(info, indent=2))
    return 0


def cmd_eval(args) -> int:
    net = load(args.net)
    bits = int(net.meta.get("precision_bits", 53))
    prec = Precision.extended(bits) if net.is_extended else Precision.standard()
    X = _read_points(args.x, net.input_dim)
    for v in harness.as_float(evaluate_batch(net, X, prec)):
        print(repr(float(v)))
    return 0


def cmd_sweep(args) -> int:
    Ms = tuple(int(m) for m in args.M_list.split(","))
    prec = None if args.precision in (None, "auto") and os.environ.get(PRECISION_ENV) is None else _precision(args.precision)
    spec = harness.SweepSpec(args.func, Ms, d=args.d, q=args.q, a=args.a, grid_points_per_axis=args.grid,
                             precision=prec, region=args.region)
    report = harness.run_sweep(spec, log=lambda s: print(s, file=sys.stderr))
    text = report.to_csv() if args.report and args.report.endswith(".csv") else report.to_json()
    if args.report:
        Path(args.report).write_text(text)
        mirror = Path(args.report).with_suffix(".json" if args.report.endswith(".csv") else ".csv")
        mirror.write_text(report.to_json() if args.report.endswith(".csv") else report.to_csv())
    print(report.to_json())
    return 0


def cmd_verify(args) -> int:
    rep = harness.run_lemma_suite(args.lemma)
    for c in rep.checks:
        status = ("PASS" if c.passed else "FAIL") if c.asserted else "INFO"
        bound = "" if c.bound is None else f" (bound {c.bound:.6g})"
        print(f"{status} {c.name}: {c.measured:.6g}{bound}")
    print(f"{rep.lemma_id}: {'PASS' if rep.passed else 'FAIL'} in {rep.seconds:.1f}s")
    if args.json:
        Path(args.json).write_text(rep.to_json())
    return 0 if rep.passed else 1


def cmd_norms(args) -> int:
    for k, v in harness.sigma_norm_report().items():
        print(f"{k} = {v!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sigapprox", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build the full approximating network")
    b.add_argument("--func", required=True, choices=NAMES)
    b.add_argument("--M", type=int, required=True)
    b.add_argument("--d", type=int, default=None)
    b.add_argument("--q", type=int, default=None)
    b.add_argument("--a", type=float, default=1.0)
    b.add_argument("--precision", default=None, help="'auto', 'standard' or a bit count")
    b.add_argument("--out", default=None)
    b.set_defaults(fn=cmd_build)

    e = sub.add_parser("eval", help="evaluate a saved network")
    e.add_argument("--net", required=True)
    e.add_argument("--x", required=True, help="CSV file of points or inline comma-separated values")
    e.set_defaults(fn=cmd_eval)

    s = sub.add_parser("sweep", help="sup error over a list of M and the fitted rate")
    s.add_argument("--func", required=True, choices=NAMES)
    s.add_argument("--M-list", dest="M_list", default="2,3,4,5,6")
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--q", type=int, default=None)
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--grid", type=int, default=None, help="grid points per axis")
    s.add_argument("--region", default="theorem1-certified", choices=harness.REGIONS)
    s.add_argument("--precision", default=None)
    s.add_argument("--report", default=None, help="JSON (or .csv) output; the other format is written alongside")
    s.set_defaults(fn=cmd_sweep)

    v = sub.add_parser("verify", help="run one verification suite")
    v.add_argument("--lemma", required=True, choices=harness.LEMMA_IDS)
    v.add_argument("--json", default=None)
    v.set_defaults(fn=cmd_verify)

    n = sub.add_parser("norms", help="print sup |sigma''| and sup |sigma'''|")
    n.set_defaults(fn=cmd_norms)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
