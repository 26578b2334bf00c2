"""Nonmonotone (Zhang-Hager style) acceptance test and safeguarded backtracking.

Acceptance compares the trial value against a weighted running average C
of past function values instead of the latest value alone.  The averaging
weight eta is 1 except once every n iterations, where it drops to a
constant c just below 1; that keeps the scheme almost monotone in C while
letting single iterations overshoot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass
class NonmonotoneState:
    """Running average state: Q weights, C reference value, iteration k."""

    Q: float
    C: float
    k: int
    n: int
    c: float
    delta: float


def eta(k, n, c):
    """Averaging weight: c when k is the last index of its length-n period, else 1."""
    return c if k % n == n - 1 else 1.0


def accept(f_trial, C, delta, alpha, gnorm2):
    """Sufficient-decrease test f(x - alpha*g) <= C - delta*alpha*||g||^2."""
    return f_trial <= C - delta * alpha * gnorm2


def backtrack(alpha, f0, g_dot_d, f_trial):
    """Shrink a rejected stepsize by safeguarded quadratic interpolation.

    Fits the parabola through (0, f0) with slope g_dot_d and (alpha,
    f_trial); its minimizer is used when the fit is convex and lands in
    the safeguard window [0.1*alpha, 0.9*alpha], otherwise the step is
    halved.  The result is always inside the window.
    """
    denom = f_trial - f0 - alpha * g_dot_d
    if math.isfinite(denom) and denom > 0.0:
        cand = -g_dot_d * alpha * alpha / (2.0 * denom)
        if 0.1 * alpha <= cand <= 0.9 * alpha:
            return cand
    return 0.5 * alpha


def update_QC(state, f_new):
    """Fold the accepted value into the running average and advance k."""
    e = eta(state.k, state.n, state.c)
    Q_next = e * state.Q + 1.0
    C_next = (e * state.Q * state.C + f_new) / Q_next
    return NonmonotoneState(Q=Q_next, C=C_next, k=state.k + 1,
                            n=state.n, c=state.c, delta=state.delta)
