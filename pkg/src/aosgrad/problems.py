"""Differentiable problem abstraction, evaluation counters, gradient checker.

A problem is an objective/gradient pair with a fixed dimension and a
conventional start point.  Evaluations go through :func:`evaluate` and
:func:`gradient` so a run can account for its oracle calls; the solver is
matrix-free and never asks for Hessians.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Problem:
    """Named differentiable objective with gradient oracle and start point."""

    name: str
    dimension: int
    objective: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    start_point: np.ndarray


@dataclass
class EvalCounters:
    """Function / gradient evaluation counts for one run."""

    nf: int = 0
    ng: int = 0


def evaluate(problem, x, counters):
    """Objective value at x, counting one function evaluation.

    Non-finite values are returned as-is; the caller decides whether the
    run has diverged.
    """
    if len(x) != problem.dimension:
        raise ValueError(
            f"{problem.name}: expected vector of length {problem.dimension}, got {len(x)}"
        )
    counters.nf += 1
    with np.errstate(all="ignore"):
        return float(problem.objective(x))


def gradient(problem, x, counters):
    """Gradient at x, counting one gradient evaluation."""
    if len(x) != problem.dimension:
        raise ValueError(
            f"{problem.name}: expected vector of length {problem.dimension}, got {len(x)}"
        )
    counters.ng += 1
    with np.errstate(all="ignore"):
        return np.asarray(problem.gradient(x), dtype=float)


def check_gradient(problem, x, h=1e-6):
    """Max relative mismatch between the analytic gradient and central differences.

    Uses a per-coordinate step h*(1 + |x_i|) so the test is insensitive to
    the scale of x, and normalizes each component error by 1 + |g_i|.
    Returns the worst error over all coordinates.
    """
    x = np.asarray(x, dtype=float)
    g = np.asarray(problem.gradient(x), dtype=float)
    worst = 0.0
    for i in range(x.size):
        hi = h * (1.0 + abs(x[i]))
        xp = x.copy()
        xp[i] += hi
        xm = x.copy()
        xm[i] -= hi
        fd = (problem.objective(xp) - problem.objective(xm)) / (2.0 * hi)
        err = abs(g[i] - fd) / (1.0 + abs(g[i]))
        if err > worst:
            worst = err
    return worst
