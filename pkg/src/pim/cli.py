"""Command line entry point: ``pim solve`` and ``pim sweep``."""

from __future__ import annotations

import argparse
import logging
import sys

from .harness import PRESETS, TRule, RunConfig, rows_to_csv, run_case, sweep, write_csv
from .kernel import PROFILES
from .manifolds import CASES, MODES


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--case", choices=sorted(CASES), required=True)
    p.add_argument("--kernel", choices=PROFILES, default="wendland_c2")
    p.add_argument("--weights", choices=("exact", "uniform", "voronoi"), default="exact")
    p.add_argument("--mode", choices=MODES, default="grid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--n-eval", type=int, default=None, help="evaluation grid size (default 4n)")
    p.add_argument("--k-nn", type=int, default=8, help="neighbors for Voronoi weights")
    p.add_argument("--jacobi", action="store_true", help="diagonal preconditioning")
    p.add_argument("--out", default=None, help="CSV path (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pim", description="Point integral Neumann Poisson solver")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="one solve with error norms")
    _common(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--t", default="empirical",
                   help=f"bandwidth value, preset ({'|'.join(PRESETS)}) or 'c,alpha'")

    w = sub.add_parser("sweep", help="convergence sweep over n with fitted rates")
    _common(w)
    w.add_argument("--n", required=True, help="comma separated, e.g. 100,200,400,800")
    w.add_argument("--coupling", default="empirical",
                   help=f"{'|'.join(PRESETS)} or 'c,alpha' for t = c h^alpha")
    w.add_argument("--jobs", type=int, default=1)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "solve":
        ns, rule = (args.n,), TRule.parse(args.t)
    else:
        ns, rule = tuple(int(v) for v in args.n.split(",")), TRule.parse(args.coupling)
    config = RunConfig(case=args.case, n=ns, t_rule=rule, kernel=args.kernel, mode=args.mode,
                       seed=args.seed, tol=args.tol, max_iter=args.max_iter, weights=args.weights,
                       n_eval=args.n_eval, k_nn=args.k_nn, jacobi=args.jacobi, out=args.out)
    if args.command == "solve":
        rows = [run_case(config)]
        slopes = None
    else:
        rows, slopes = sweep(config, jobs=args.jobs)
    if args.out:
        write_csv(rows, args.out)
    else:
        sys.stdout.write(rows_to_csv(rows))
    msg = f"kernel={args.kernel} t-rule={rule.name} weights={args.weights} mode={args.mode}"
    if slopes:
        msg += " slopes: " + " ".join(f"{k}={v:.3f}" for k, v in slopes.items())
    print(msg, file=sys.stderr)
    return 0 if all(r.converged for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
