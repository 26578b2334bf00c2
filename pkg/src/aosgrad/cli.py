"""Benchmark command line.

Runs a grid of solvers over catalog problems, prints one line per run,
and writes the records CSV plus optional Dolan-More profile CSV / plots.

    bench --problems sphere,ext_rosenbrock --n 1000 --solvers gm_aos_cr,bb \
          --csv records.csv --profile profiles.csv

Set AOSGRAD_THREADS to run suite entries in parallel.
"""

from __future__ import annotations

import argparse
import sys

from .bench import METRICS, BenchPlan, emit_outputs, performance_profile, run_suite
from .solver import CONVERGED, SolverConfig, verify_trace
from .suite import block_size, problem_names


def build_parser():
    p = argparse.ArgumentParser(
        prog="bench",
        description="Benchmark gradient solvers on the native problem suite.")
    p.add_argument("--problems", default="all",
                   help="comma-separated catalog names, or 'all' (default)")
    p.add_argument("--n", type=int, default=1000,
                   help="problem dimension (default 1000)")
    p.add_argument("--solvers", default="gm_aos_cr,bb",
                   help="comma-separated solver ids (default gm_aos_cr,bb)")
    p.add_argument("--tol", type=float, default=None,
                   help="sup-norm gradient tolerance (default 1e-6)")
    p.add_argument("--max-iter", type=int, default=None,
                   help="iteration cap (default 50000)")
    p.add_argument("--max-nf", type=int, default=None,
                   help="function-evaluation cap (default 80000)")
    p.add_argument("--sigma0", type=float, default=None,
                   help="initial regularization weight (default 50)")
    p.add_argument("--csv", default=None, help="records CSV output path")
    p.add_argument("--profile", default=None, help="profile CSV output path")
    p.add_argument("--plot", default=None,
                   help="profile plot path prefix (writes <prefix>_<metric>.svg)")
    p.add_argument("--trace", action="store_true",
                   help="record per-iteration traces and verify the trajectory "
                        "invariants on every run (memory heavy)")
    p.add_argument("--list-problems", action="store_true",
                   help="list catalog problems and exit")
    return p


def _make_config(args):
    config = SolverConfig()
    if args.tol is not None:
        config.epsilon = args.tol
    if args.max_iter is not None:
        config.max_iter = args.max_iter
    if args.max_nf is not None:
        config.max_nf = args.max_nf
    if args.sigma0 is not None:
        config.sigma0 = args.sigma0
    return config


def main(argv=None):
    args = build_parser().parse_args(argv)

    if args.list_problems:
        for name in problem_names():
            print(f"{name}  (dimension: multiple of {block_size(name)})")
        return 0

    names = problem_names() if args.problems == "all" else [
        s.strip() for s in args.problems.split(",") if s.strip()]
    try:
        for name in names:
            block = block_size(name)
            if args.n < 1 or args.n % block != 0:
                raise ValueError(
                    f"{name}: --n must be a positive multiple of {block}, got {args.n}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    plan = BenchPlan(problems=[(name, args.n) for name in names], solvers=solvers,
                     config=_make_config(args), csv_path=args.csv,
                     profile_path=args.profile, plot_path=args.plot, trace=args.trace)
    try:
        records = run_suite(plan)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    for r in records:
        print(f"{r.problem_name:<22} n={r.n:<6} {r.solver_name:<10} {r.status:<19} "
              f"iters={r.iters:<6} nf={r.nf:<6} ng={r.ng:<6} "
              f"f={r.final_f:.6e} |g|={r.final_gnorm_inf:.3e} t={r.wall_time_seconds:.2f}s")
    if args.trace:
        try:
            checked = sum(verify_trace(r, plan.config) for r in records)
        except ValueError as exc:
            print(f"trace invariant violated: {exc}", file=sys.stderr)
            return 1
        print(f"trace invariants OK ({checked} iterations across {len(records)} runs)")
    for s in solvers:
        solved = sum(1 for r in records if r.solver_name == s and r.status == CONVERGED)
        total = sum(1 for r in records if r.solver_name == s)
        print(f"{s}: solved {solved}/{total}")

    curves_by_metric = None
    if args.profile or args.plot:
        curves_by_metric = {m: performance_profile(records, m) for m in METRICS}
    written = emit_outputs(records, curves_by_metric, csv_path=args.csv,
                           profile_path=args.profile, plot_path=args.plot)
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
