"""Gradient-descent drivers.

`solve` runs the gradient method with approximately optimal stepsizes and
adaptive cubic regularization; `solve_bb` runs the Barzilai-Borwein
baseline with the identical initial stepsize, nonmonotone line search and
termination rules, so the two are directly comparable in benchmarks.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linesearch import NonmonotoneState, accept, backtrack, update_QC
from .problems import EvalCounters, evaluate, gradient
from .regularization import RegularizationState, inflate_sigma, rho, update_sigma
from .stepsize import (
    AOS1,
    AOS2A,
    AOS2B,
    AOS3,
    AOS4A,
    AOS4B,
    AOS4C,
    BB1,
    BB_FALLBACK,
    INITIAL,
    PairMemory,
    bb1,
    choose_stepsize,
)

CONVERGED = "converged"
MAX_ITER = "max_iter"
MAX_NF = "max_nf"
LINESEARCH_FAILURE = "linesearch_failure"
DIVERGED = "diverged"

STATUSES = (CONVERGED, MAX_ITER, MAX_NF, LINESEARCH_FAILURE, DIVERGED)

# objective values below this are treated as divergence to -infinity
F_LOWER_GUARD = -1e15

_CASE_I = (AOS1, AOS2A, AOS2B)


@dataclass
class SolverConfig:
    """Every tunable of the solvers; defaults are the standard settings."""

    epsilon: float = 1e-6        # sup-norm gradient tolerance
    delta: float = 1e-4          # sufficient-decrease constant
    c: float = 0.9999            # periodic averaging weight
    c1: float = 1e-8             # tight quadratic-closeness threshold
    c2: float = 0.07             # loose two-step quadratic-closeness threshold
    xi1: float = 1.07            # scaling of the curvature model's diagonal seed
    xi2: float = 0.85            # gradient-collinearity threshold (far-from-quadratic)
    xi3: float = 0.85            # gradient-collinearity threshold (near-quadratic)
    eta_bar1: float = 0.05       # clamp width for the third-order correction
    gamma1: float = 1.35         # sigma shrink factor
    gamma2: float = 1.5          # sigma mild growth factor
    gamma3: float = 5.625        # sigma strong growth / retry factor
    v1: float = 0.1              # low agreement threshold
    v2: float = 0.9              # high agreement threshold
    lambda_min: float = 1e-30    # stepsize clamp floor
    lambda_max: float = 1e30     # stepsize clamp ceiling
    sigma0: float = 50.0         # initial regularization weight
    upsilon: float = 10.0        # fallback stepsize multiplier
    max_iter: int = 50000
    max_nf: int = 80000
    max_inner_retries: int = 10  # sigma inflations per iteration
    max_backtracks: int = 60     # line-search shrinks per iteration


@dataclass
class IterateState:
    """Everything the stepsize engine may read at one iterate."""

    x: np.ndarray
    f: float
    g: np.ndarray
    gnorm2: float
    gnorm_inf: float
    k: int
    memory: PairMemory | None
    nm: NonmonotoneState
    reg: RegularizationState
    counters: EvalCounters


class TraceRow(NamedTuple):
    """Per-iteration record; holds the predicates needed to replay dispatch."""

    k: int
    f: float
    C: float
    Q: float
    gnorm_inf: float
    gnorm2: float
    alpha: float
    branch: str
    sigma: float
    mu: float
    mu_prev: float
    sty: float
    ratio: float


@dataclass
class RunRecord:
    """Outcome of one (problem, solver) run."""

    problem_name: str
    n: int
    solver_name: str
    status: str
    iters: int
    nf: int
    ng: int
    wall_time_seconds: float
    final_f: float
    final_gnorm_inf: float
    trace: list[TraceRow] | None = None


def verify_trace(record, config):
    """Re-assert the per-run invariants from a recorded trace.

    Checks the reference-value ordering f <= C, the bound on the averaging
    weight Q, the stepsize clamp window, the sufficient-decrease inequality
    at every acceptance (replayed exactly on the stored floats), that C is
    nonincreasing up to roundoff, and that each branch tag is consistent
    with the recorded dispatch predicates.  Raises ValueError on the first
    violation; returns the number of rows checked.
    """
    rows = record.trace
    if rows is None:
        raise ValueError(f"{record.problem_name}: run has no trace")
    qbound = 1.0 + record.n / (1.0 - config.c)
    for i, row in enumerate(rows):
        where = f"{record.problem_name}/{record.solver_name} k={row.k}"
        tol = 1e-12 * (1.0 + abs(row.C))
        if row.f > row.C + tol:
            raise ValueError(f"{where}: f exceeds the reference value C")
        if row.Q > qbound * (1.0 + 1e-12):
            raise ValueError(f"{where}: Q exceeds 1 + n/(1-c)")
        if not (config.lambda_min * 0.1 ** config.max_backtracks
                <= row.alpha <= config.lambda_max):
            raise ValueError(f"{where}: stepsize {row.alpha} outside clamp window")
        f_next = rows[i + 1].f if i + 1 < len(rows) else record.final_f
        if f_next > row.C - config.delta * row.alpha * row.gnorm2:
            raise ValueError(f"{where}: sufficient decrease does not replay")
        if i + 1 < len(rows) and rows[i + 1].C > row.C + tol:
            raise ValueError(f"{where}: reference value C increased")
        if row.branch == INITIAL:
            if row.k != 0:
                raise ValueError(f"{where}: initial branch after iteration 0")
        elif record.solver_name == "gm_aos_cr":
            if row.branch not in _replay_branches(row, config):
                raise ValueError(f"{where}: branch {row.branch} contradicts "
                                 f"(mu, s'y, ratio) predicates")
    return len(rows)


def _replay_branches(row, config):
    near = row.mu <= config.c1 or (
        not math.isnan(row.mu_prev) and max(row.mu, row.mu_prev) <= config.c2)
    if not near:
        if row.sty > 0.0:
            return {AOS1}
        return {AOS2A} if row.ratio < config.xi2 else {AOS2B}
    if row.sty > 0.0:
        return {AOS3}
    # the finite-difference branch falls back when the sampled curvature is 0
    return {AOS4A, AOS4C} if row.ratio < config.xi3 else {AOS4B, AOS4C}


def initial_stepsize(x0, f0, g0):
    """First-iteration stepsize from the scales of x0, f0 and g0.

    Four cases on ||x0||_inf, |f0| and ||g0||_inf: near the origin the
    step is sized from the function value (or 1 when that is tiny too);
    away from it, from the ratio of iterate to gradient sup-norms, with a
    1/||g0||_inf floor when the gradient is huge.
    """
    x_inf = float(np.max(np.abs(x0)))
    g_inf = float(np.max(np.abs(g0)))
    if x_inf < 1e-30:
        if abs(f0) >= 1e-30:
            return 50.0 * abs(f0) / float(g0 @ g0)
        return 1.0
    if g_inf >= 1e7:
        return min(1.0, max(x_inf / g_inf, 1.0 / g_inf))
    return min(1.0, x_inf / g_inf)


def solve(problem, config=None, record_trace=False):
    """Minimize with cubic-regularization-based approximately optimal stepsizes.

    Per iteration: test convergence, pick a stepsize branch, and for the
    far-from-quadratic branches evaluate the trial point and retry with an
    inflated sigma while the agreement ratio is poor; update sigma; run the
    nonmonotone line search from the proposal; fold the accepted value into
    the running average and refresh the step/gradient pair memory.

    Parameters
    ----------
    problem : Problem
    config : SolverConfig, optional
    record_trace : bool
        Keep a per-iteration TraceRow list on the returned record
        (off by default, the trace can be large).

    Returns
    -------
    RunRecord
    """
    return _run(problem, config or SolverConfig(), "gm_aos_cr", record_trace)


def solve_bb(problem, config=None, record_trace=False):
    """Barzilai-Borwein baseline: BB1 stepsizes with the same line search.

    Falls back to upsilon*alpha_prev when s'y <= 0; shares the initial
    stepsize, nonmonotone acceptance, clamping and termination rules with
    `solve`, and none of the regularization machinery.
    """
    return _run(problem, config or SolverConfig(), "bb", record_trace)


def _norms(g):
    return float(g @ g), float(np.max(np.abs(g)))


def _make_record(name, n, solver_name, status, state, t0):
    return RunRecord(
        problem_name=name,
        n=n,
        solver_name=solver_name,
        status=status,
        iters=state.k,
        nf=state.counters.nf,
        ng=state.counters.ng,
        wall_time_seconds=time.perf_counter() - t0,
        final_f=state.f,
        final_gnorm_inf=state.gnorm_inf,
    )


def _run(problem, config, solver_name, record_trace):
    t0 = time.perf_counter()
    counters = EvalCounters()
    x = np.array(problem.start_point, dtype=float)
    f = evaluate(problem, x, counters)
    g = gradient(problem, x, counters)
    gnorm2, gnorm_inf = _norms(g)
    state = IterateState(
        x=x,
        f=f,
        g=g,
        gnorm2=gnorm2,
        gnorm_inf=gnorm_inf,
        k=0,
        memory=None,
        nm=NonmonotoneState(Q=1.0, C=f, k=0, n=problem.dimension,
                            c=config.c, delta=config.delta),
        reg=RegularizationState(sigma=config.sigma0, gamma1=config.gamma1,
                                gamma2=config.gamma2, gamma3=config.gamma3,
                                v1=config.v1, v2=config.v2),
        counters=counters,
    )
    rows = [] if record_trace else None

    status = None
    if not (math.isfinite(f) and np.isfinite(g).all()):
        status = DIVERGED

    while status is None:
        if state.gnorm_inf <= config.epsilon:
            status = CONVERGED
            break
        if state.k >= config.max_iter:
            status = MAX_ITER
            break
        if counters.nf >= config.max_nf:
            status = MAX_NF
            break

        scratch = {}
        f_trial = None
        if solver_name == "bb":
            alpha, branch = _bb_proposal(state, config, scratch)
        else:
            alpha, branch, f_trial = _gm_proposal(state, config, problem, scratch)
        if not math.isfinite(alpha) or alpha <= 0.0:
            # unreachable under normal arithmetic; restart from a unit step
            alpha, f_trial = min(1.0, config.lambda_max), None

        # nonmonotone line search, reusing the retry-loop trial when it exists
        if f_trial is None:
            f_trial = evaluate(problem, state.x - alpha * state.g, counters)
        backtracks = 0
        while True:
            if math.isfinite(f_trial) and accept(f_trial, state.nm.C, config.delta,
                                                 alpha, state.gnorm2):
                break
            if f_trial == -math.inf:
                status = DIVERGED
                break
            if backtracks >= config.max_backtracks:
                status = LINESEARCH_FAILURE
                break
            if counters.nf >= config.max_nf:
                status = MAX_NF
                break
            alpha = backtrack(alpha, state.f, -state.gnorm2, f_trial)
            f_trial = evaluate(problem, state.x - alpha * state.g, counters)
            backtracks += 1
        if status is not None:
            break

        x_new = state.x - alpha * state.g
        f_new = f_trial
        g_new = gradient(problem, x_new, counters)

        if rows is not None:
            mem = state.memory
            rows.append(TraceRow(
                k=state.k, f=state.f, C=state.nm.C, Q=state.nm.Q,
                gnorm_inf=state.gnorm_inf, gnorm2=state.gnorm2,
                alpha=alpha, branch=branch,
                sigma=state.reg.sigma if solver_name != "bb" else math.nan,
                mu=scratch.get("mu", math.nan),
                mu_prev=(mem.mu_prev if mem is not None and mem.mu_prev is not None
                         else math.nan),
                sty=scratch.get("sty", math.nan),
                ratio=scratch.get("ratio", math.nan),
            ))

        state.memory = PairMemory(s=x_new - state.x, y=g_new - state.g,
                                  f_prev=state.f, g_prev=state.g,
                                  alpha_prev=alpha, mu_prev=scratch.get("mu"))
        state.nm = update_QC(state.nm, f_new)
        state.x, state.f, state.g = x_new, f_new, g_new
        state.gnorm2, state.gnorm_inf = _norms(g_new)
        state.k += 1

        if not np.isfinite(g_new).all() or f_new < F_LOWER_GUARD:
            status = DIVERGED
            break

    record = _make_record(problem.name, problem.dimension, solver_name, status, state, t0)
    record.trace = rows
    return record


def _bb_proposal(state, config, scratch):
    if state.memory is None:
        alpha, branch = initial_stepsize(state.x, state.f, state.g), INITIAL
    else:
        m = state.memory
        sty = float(m.s @ m.y)
        scratch["sty"] = sty
        if sty > 0.0:
            alpha, branch = bb1(m.s, m.y), BB1
        else:
            alpha, branch = config.upsilon * m.alpha_prev, BB_FALLBACK
    return max(min(alpha, config.lambda_max), config.lambda_min), branch


def _gm_proposal(state, config, problem, scratch):
    """Stepsize selection with the sigma machinery; returns (alpha, branch, f_trial).

    The far-from-quadratic branches evaluate f at the trial point to form
    the agreement ratio, inflating sigma and reproposing while it stays
    below v1 (the evaluation is reused when the clamp leaves the proposal
    unchanged, and later by the line search); the sigma update then
    consumes the final ratio.  Near-quadratic iterations shrink sigma
    unconditionally and leave the trial evaluation to the line search.
    The first iteration has no pair memory: it uses the scale-based
    initial stepsize and the post-trial ratio, without the retry loop.
    """
    counters = state.counters
    f_trial = None
    if state.memory is None:
        branch = INITIAL
        alpha = max(min(initial_stepsize(state.x, state.f, state.g),
                        config.lambda_max), config.lambda_min)
        f_trial = evaluate(problem, state.x - alpha * state.g, counters)
        state.reg = update_sigma(state.reg, rho(state.nm.C, state.f, f_trial),
                                 near_quadratic=False)
        return alpha, branch, f_trial

    prop = choose_stepsize(state, config, problem, scratch)
    alpha, branch = prop.alpha, prop.branch
    if branch in _CASE_I:
        f_trial = evaluate(problem, state.x - alpha * state.g, counters)
        rho_k = rho(state.nm.C, state.f, f_trial)
        for _ in range(config.max_inner_retries):
            if rho_k > config.v1 or counters.nf >= config.max_nf:
                break
            state.reg = inflate_sigma(state.reg)
            prop = choose_stepsize(state, config, problem, scratch)
            if prop.alpha != alpha:
                alpha = prop.alpha
                f_trial = evaluate(problem, state.x - alpha * state.g, counters)
                rho_k = rho(state.nm.C, state.f, f_trial)
        state.reg = update_sigma(state.reg, rho_k, near_quadratic=False)
    else:
        # agreement ratio is irrelevant here: the quadratic-closeness test
        # held, which forces the shrink branch of the update
        state.reg = update_sigma(state.reg, math.nan, near_quadratic=True)
    return alpha, branch, f_trial
