#!/usr/bin/env python3
"""Sensitivity of the main solver to the initial regularization weight.

Runs the full catalog once per sigma0 in {25, 50, 75, 100} and reports
the solved count and total function evaluations for each setting.

    python3 scripts/sigma0_sweep.py [n]
"""

import pathlib
import sys

from aosgrad import BenchPlan, SolverConfig, problem_names, run_suite
from aosgrad.bench import write_records_csv

if __name__ == "__main__":
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
    out = pathlib.Path("results")
    out.mkdir(exist_ok=True)
    for sigma0 in (25.0, 50.0, 75.0, 100.0):
        plan = BenchPlan(problems=[(name, n) for name in problem_names()],
                         solvers=["gm_aos_cr"], config=SolverConfig(sigma0=sigma0))
        records = run_suite(plan)
        solved = sum(1 for r in records if r.status == "converged")
        total_nf = sum(r.nf for r in records)
        total_time = sum(r.wall_time_seconds for r in records)
        path = out / f"sigma0_{int(sigma0)}_n{n}.csv"
        write_records_csv(records, path)
        print(f"sigma0={sigma0:>6.1f}: solved {solved}/{len(records)}, "
              f"total nf={total_nf}, time={total_time:.1f}s -> {path}")
