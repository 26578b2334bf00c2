"""Benchmark harness: solver-by-problem grids, CSV emission, performance profiles.

A run grid is described by a BenchPlan; `run_suite` executes it (optionally
across threads, each run owns all of its state) and returns records sorted
by (problem, n, solver) so output is deterministic.  Profiles follow the
Dolan-More convention: per-problem cost ratios against the best solver,
with unsolved problems assigned an infinite ratio.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .solver import CONVERGED, RunRecord, SolverConfig, solve, solve_bb
from .suite import make_problem

SOLVERS = {"gm_aos_cr": solve, "bb": solve_bb}

METRICS = ("iters", "nf", "ng", "time")

THREADS_ENV = "AOSGRAD_THREADS"

RECORD_HEADER = ["problem", "n", "solver", "status", "iters", "nf", "ng",
                 "time_s", "final_f", "final_gnorm_inf"]

PROFILE_HEADER = ["metric", "solver", "tau", "fraction"]


@dataclass
class BenchPlan:
    """One benchmark campaign: problems x solvers under a single config."""

    problems: list[tuple[str, int]]
    solvers: list[str]
    config: SolverConfig = field(default_factory=SolverConfig)
    csv_path: str | None = None
    profile_path: str | None = None
    plot_path: str | None = None
    trace: bool = False


@dataclass
class ProfileCurve:
    """Cumulative fraction of problems solved within a cost ratio tau."""

    solver_name: str
    points: list[tuple[float, float]]

    def fraction_at(self, tau):
        out = 0.0
        for t, frac in self.points:
            if t <= tau:
                out = frac
            else:
                break
        return out


def run_suite(plan):
    """Execute every (problem, solver) pair of the plan.

    Individual failures become run statuses, never suite aborts.  The
    AOSGRAD_THREADS environment variable (default 1) sets the worker
    count; results are identical either way.
    """
    if not plan.problems or not plan.solvers:
        raise ValueError("plan needs at least one problem and one solver")
    for s in plan.solvers:
        if s not in SOLVERS:
            raise ValueError(f"unknown solver {s!r}; known: {', '.join(SOLVERS)}")
    jobs = [(name, n, s) for (name, n) in plan.problems for s in plan.solvers]

    def one(job):
        name, n, s = job
        problem = make_problem(name, n)
        return SOLVERS[s](problem, plan.config, record_trace=plan.trace)

    threads = int(os.environ.get(THREADS_ENV, "1"))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(one, jobs))
    else:
        records = [one(job) for job in jobs]
    records.sort(key=lambda r: (r.problem_name, r.n, r.solver_name))
    return records


def _metric_value(record, metric):
    if metric == "iters":
        return float(record.iters)
    if metric == "nf":
        return float(record.nf)
    if metric == "ng":
        return float(record.ng)
    if metric == "time":
        return record.wall_time_seconds
    raise ValueError(f"unknown metric {metric!r}; known: {', '.join(METRICS)}")


def performance_profile(records, metric):
    """Dolan-More profile curves over a full solver-by-problem grid.

    For each problem the cost of every solver is divided by the best cost
    on that problem; failed runs count as infinitely expensive.  Curve s
    maps tau to the fraction of problems with ratio <= tau.
    """
    problems = sorted({(r.problem_name, r.n) for r in records})
    solvers = sorted({r.solver_name for r in records})
    table = {}
    for r in records:
        key = (r.problem_name, r.n, r.solver_name)
        if key in table:
            raise ValueError(f"duplicate record for {key}")
        table[key] = r
    for p, n in problems:
        for s in solvers:
            if (p, n, s) not in table:
                raise ValueError(f"grid gap: no record for problem {p!r} n={n} solver {s!r}")

    cost = {}
    for p, n in problems:
        for s in solvers:
            r = table[(p, n, s)]
            cost[(p, n, s)] = _metric_value(r, metric) if r.status == CONVERGED else math.inf

    ratios = {s: [] for s in solvers}
    for p, n in problems:
        best = min(cost[(p, n, s)] for s in solvers)
        for s in solvers:
            c = cost[(p, n, s)]
            if not math.isfinite(c):
                ratios[s].append(math.inf)
            elif c == best:
                ratios[s].append(1.0)
            elif best == 0.0:
                ratios[s].append(math.inf)
            else:
                ratios[s].append(c / best)

    taus = sorted({t for rs in ratios.values() for t in rs if math.isfinite(t)} | {1.0})
    nprob = len(problems)
    curves = []
    for s in solvers:
        pts = [(t, sum(1 for r in ratios[s] if r <= t) / nprob) for t in taus]
        curves.append(ProfileCurve(solver_name=s, points=pts))
    return curves


def write_records_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RECORD_HEADER)
        for r in records:
            w.writerow([r.problem_name, r.n, r.solver_name, r.status, r.iters,
                        r.nf, r.ng, repr(r.wall_time_seconds), repr(r.final_f),
                        repr(r.final_gnorm_inf)])


def read_records_csv(path):
    """Re-parse a records CSV into RunRecords (traces are not stored)."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            out.append(RunRecord(
                problem_name=row["problem"], n=int(row["n"]), solver_name=row["solver"],
                status=row["status"], iters=int(row["iters"]), nf=int(row["nf"]),
                ng=int(row["ng"]), wall_time_seconds=float(row["time_s"]),
                final_f=float(row["final_f"]),
                final_gnorm_inf=float(row["final_gnorm_inf"]),
            ))
    return out


def write_profile_csv(curves_by_metric, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PROFILE_HEADER)
        for metric, curves in curves_by_metric.items():
            for curve in curves:
                for tau, frac in curve.points:
                    w.writerow([metric, curve.solver_name, repr(tau), repr(frac)])


def plot_profiles(curves_by_metric, prefix):
    """Step plots of each metric's profile (log-2 tau axis), one SVG per metric."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    for metric, curves in curves_by_metric.items():
        fig, ax = plt.subplots(figsize=(5.0, 3.8))
        for curve in curves:
            if not curve.points:
                continue
            taus = [t for t, _ in curve.points]
            fracs = [f for _, f in curve.points]
            ax.step(taus, fracs, where="post", label=curve.solver_name)
        ax.set_xscale("log", base=2)
        ax.set_xlabel("tau")
        ax.set_ylabel("fraction of problems")
        ax.set_ylim(0.0, 1.05)
        ax.set_title(f"performance profile ({metric})")
        ax.legend(loc="lower right")
        fig.tight_layout()
        path = f"{prefix}_{metric}.svg"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written


def emit_outputs(records, curves_by_metric=None, csv_path=None, profile_path=None,
                 plot_path=None):
    """Write the records CSV, the profile CSV and optional profile plots."""
    written = []
    if csv_path:
        write_records_csv(records, csv_path)
        written.append(csv_path)
    if profile_path:
        write_profile_csv(curves_by_metric or {}, profile_path)
        written.append(profile_path)
    if plot_path:
        written.extend(plot_profiles(curves_by_metric or {}, plot_path))
    return written
