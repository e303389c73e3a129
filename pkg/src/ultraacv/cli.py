"""Command-line entry point: ``ultraacv <law|combinatorics|simulate|sweep|verify>``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import combinatorics as comb
from .ensemble import EntryDistribution
from .errors import UltraAcvError
from .export import export
from .harness import RunConfig, SweepConfig, run_single, run_sweep
from .laws import LimitLaw, law_cdf, law_moment, law_pdf, law_quantile, stieltjes_squared
from .spectral_stats import Spectrum, histogram
from .verify import verify_suite


def _law_cmd(args) -> int:
    if args.op == "stieltjes":
        if args.re is None:
            raise SystemExit("law stieltjes needs --re")
        s = stieltjes_squared(complex(args.re, args.im))
        print(json.dumps({"re": s.real, "im": s.imag}))
        return 0
    if args.law is None:
        raise SystemExit(f"law {args.op} needs --law")
    law = LimitLaw(args.law)
    if args.op in ("pdf", "cdf"):
        if args.x is None:
            raise SystemExit(f"law {args.op} needs --x")
        fn = law_pdf if args.op == "pdf" else law_cdf
        print(repr(float(fn(law, args.x))))
    elif args.op == "quantile":
        if args.u is None:
            raise SystemExit("law quantile needs --u")
        print(repr(law_quantile(law, args.u)))
    else:
        if args.k is None:
            raise SystemExit("law moment needs --k")
        print(law_moment(law, args.k))
    return 0


def _comb_cmd(args) -> int:
    k = args.k
    if args.op == "catalan":
        print(comb.catalan(k))
    elif args.op == "dyck":
        print(comb.count_dyck_paths(k))
    elif args.op == "isoclass":
        if args.t is None:
            raise SystemExit("isoclass needs --t")
        print(comb.iso_class_count(k, args.t))
    else:
        if args.t is None or args.s is None:
            raise SystemExit("isobound needs --t and --s")
        if args.t == 1:
            print(comb.iso_class_bound_t1(k, args.s))
        else:
            print(comb.iso_class_bound(k, args.t, args.s))
    return 0


def _simulate_cmd(args) -> int:
    cfg = RunConfig(
        p=args.p,
        T=args.T,
        distribution=EntryDistribution.parse(args.dist),
        lag=args.lag,
        base_seed=args.seed,
        replications=args.reps,
    )
    rec = run_single(cfg, workers=args.workers, timing=args.timing,
                     keep_spectra=args.histogram is not None)
    export([rec], args.format, args.out)
    if args.histogram is not None:
        pooled = Spectrum(np.concatenate([s.values for s in rec.spectra]))
        histogram(pooled, args.bins, LimitLaw.SQUARED).to_csv(args.histogram)
    failed = [r for r in rec.replications if not r.ok]
    for r in failed:
        print(f"replication {r.rep} failed: {r.error}", file=sys.stderr)
    return 0


def _sweep_cmd(args) -> int:
    with open(args.config) as fh:
        sweep = SweepConfig.from_dict(json.load(fh))
    summary = run_sweep(sweep, workers=args.workers, timing=args.timing)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    export(summary.records, "csv", out / "records.csv")
    export(summary.records, "jsonl", out / "records.jsonl")
    with open(out / "summary.json", "w") as fh:
        json.dump(summary.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    for pt in summary.points:
        print(f"p={pt.p:<5d} T={pt.T:<7d} p/T={pt.ratio:.4g}  mean KS={pt.mean_ks_squared:.4f}"
              f"  median lambda_max={pt.median_lambda_max:.4f}")
    return 0


def _verify_cmd(args) -> int:
    report = verify_suite()
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print("\n".join(report.lines()))
        print(f"{len(report.checks) - len(report.failures)}/{len(report.checks)} checks passed")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ultraacv", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    law = sub.add_parser("law", help="evaluate the limit laws")
    law.add_argument("op", choices=["pdf", "cdf", "quantile", "moment", "stieltjes"])
    law.add_argument("--law", choices=[m.value for m in LimitLaw])
    law.add_argument("--x", type=float)
    law.add_argument("--u", type=float)
    law.add_argument("--k", type=int)
    law.add_argument("--re", type=float)
    law.add_argument("--im", type=float, default=0.0)
    law.set_defaults(func=_law_cmd)

    cb = sub.add_parser("combinatorics", help="exact moment-method counts")
    cb.add_argument("op", choices=["catalan", "dyck", "isoclass", "isobound"])
    cb.add_argument("--k", type=int, required=True)
    cb.add_argument("--t", type=int, help="distinct I-vertices")
    cb.add_argument("--s", type=int, help="distinct J-vertices (not the lag)")
    cb.set_defaults(func=_comb_cmd)

    sim = sub.add_parser("simulate", help="replicated spectra at one (p, T)")
    sim.add_argument("--p", type=int, required=True)
    sim.add_argument("--T", type=int, required=True)
    sim.add_argument("--lag", type=int, default=1)
    sim.add_argument("--dist", default="gaussian",
                     help="family[:nu][@threshold], e.g. gaussian, student_t:5@2.83")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--reps", type=int, default=1)
    sim.add_argument("--out", required=True)
    sim.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    sim.add_argument("--workers", type=int)
    sim.add_argument("--timing", action="store_true", help="record wall-clock times")
    sim.add_argument("--histogram", metavar="CSV", help="also write a pooled histogram")
    sim.add_argument("--bins", type=int, default=64)
    sim.set_defaults(func=_simulate_cmd)

    sw = sub.add_parser("sweep", help="run a sweep described by a JSON file")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", required=True)
    sw.add_argument("--workers", type=int)
    sw.add_argument("--timing", action="store_true")
    sw.set_defaults(func=_sweep_cmd)

    vf = sub.add_parser("verify", help="run the self-verification suite")
    vf.add_argument("--json", action="store_true")
    vf.set_defaults(func=_verify_cmd)
    return ap


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UltraAcvError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
