"""Adaptive control of the cubic regularization weight sigma.

sigma acts like an inverse trust-region radius in the cubic stepsize
models.  It is steered by the agreement ratio rho between the decrease
measured against the nonmonotone reference C and the plain decrease from
the current iterate, and inflated in-place when a proposed step looks
poor before the line search even runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

# overflow guards only, far outside any reachable regime
SIGMA_MIN = 1e-300
SIGMA_MAX = 1e300


@dataclass
class RegularizationState:
    sigma: float
    gamma1: float
    gamma2: float
    gamma3: float
    v1: float
    v2: float


def rho(C, f_cur, f_trial):
    """Agreement ratio (C - f_trial) / (f_cur - f_trial).

    A zero denominator maps to +inf when the numerator is positive and to
    0 otherwise; a negative denominator (trial worse than the current
    iterate) returns the ratio as-is, which is typically negative.
    """
    pred = f_cur - f_trial
    if pred == 0.0:
        return math.inf if C - f_trial > 0.0 else 0.0
    return (C - f_trial) / pred


def _clamped(state, sigma):
    return replace(state, sigma=min(max(sigma, SIGMA_MIN), SIGMA_MAX))


def update_sigma(state, rho_k, near_quadratic):
    """End-of-iteration sigma update.

    Shrink by gamma1 on strong agreement (rho > v2) or whenever the
    objective looked locally quadratic; grow by gamma2 on middling
    agreement (v1 <= rho <= v2); grow by gamma3 otherwise.
    """
    if near_quadratic or rho_k > state.v2:
        return _clamped(state, state.sigma / state.gamma1)
    if state.v1 <= rho_k <= state.v2:
        return _clamped(state, state.gamma2 * state.sigma)
    return _clamped(state, state.gamma3 * state.sigma)


def inflate_sigma(state):
    """In-iteration retry inflation by gamma3."""
    return _clamped(state, state.gamma3 * state.sigma)
