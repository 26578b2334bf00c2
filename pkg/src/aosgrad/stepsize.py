"""Stepsize candidates for the gradient method.

Provides the Barzilai-Borwein pair, the quadratic-closeness measure mu,
the rank-two curvature quadratic form g'Bg, and the families of
approximately optimal stepsizes: exact minimizers of a local cubic
(when the objective looks far from quadratic) or quadratic (when close)
model of f along the negative-gradient ray, with dedicated forms for
non-positive curvature.  Dispatch between the families lives in
:func:`choose_stepsize`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problems import gradient

AOS1 = "AOS1"
AOS2A = "AOS2a"
AOS2B = "AOS2b"
AOS3 = "AOS3"
AOS4A = "AOS4a"
AOS4B = "AOS4b"
AOS4C = "AOS4c"
INITIAL = "INITIAL"
BB1 = "BB1"
BB_FALLBACK = "BB_FALLBACK"

# Tags the engine itself can emit (BB1/BB_FALLBACK belong to the baseline solver).
BRANCHES = (AOS1, AOS2A, AOS2B, AOS3, AOS4A, AOS4B, AOS4C, INITIAL)


@dataclass
class PairMemory:
    """Step/gradient differences and scalars carried from the last accepted step."""

    s: np.ndarray
    y: np.ndarray
    f_prev: float
    g_prev: np.ndarray
    alpha_prev: float
    mu_prev: float | None = None


@dataclass
class CurvatureInfo:
    """Scalars of the rank-two curvature model built on the pair (s, y)."""

    sty: float
    rbar: float
    ybar_dot_g: float
    s_dot_ybar: float
    gBg: float


@dataclass
class StepProposal:
    alpha: float
    branch: str


def bb1(s, y):
    """First Barzilai-Borwein stepsize ||s||^2 / (s'y); requires s'y > 0."""
    return float(s @ s) / float(s @ y)


def bb2(s, y):
    """Second Barzilai-Borwein stepsize (s'y) / ||y||^2; requires s'y > 0."""
    return float(s @ y) / float(y @ y)


def mu(f_prev, f_cur, g_cur, s, y):
    """How far the last step deviated from exact quadratic behaviour.

    Zero for data from any exact quadratic.  Returns +inf when s'y = 0,
    so the quadratic-closeness test fails in that degenerate case.
    """
    sty = float(s @ y)
    if sty == 0.0:
        return math.inf
    return abs(2.0 * (f_prev - f_cur + float(g_cur @ s)) / sty - 1.0)


def near_quadratic(mu_k, mu_prev, c1, c2):
    """True when mu_k <= c1, or both recent mu values are <= c2."""
    if mu_k <= c1:
        return True
    return mu_prev is not None and max(mu_k, mu_prev) <= c2


def rbar(f_prev, f_cur, g_prev, g_cur, s, sty, eta_bar1):
    """Third-order correction 3*(g+g_prev)'s + 6*(f_prev-f), clamped.

    The clamp keeps |rbar| <= eta_bar1 * s'y so the corrected pair
    retains positive curvature.
    """
    raw = 3.0 * float((g_cur + g_prev) @ s) + 6.0 * (f_prev - f_cur)
    bound = eta_bar1 * sty
    return min(max(raw, -bound), bound)


def quad_form_B(g, s, y, rbar_val, xi1):
    """Quadratic form g'Bg of the rank-two curvature matrix, matrix-free.

    B = d*I - d*ss'/||s||^2 + ybar*ybar'/(s'ybar) with d = xi1*||y||^2/(s'y)
    and ybar = y + (rbar/||s||^2)*s.  For s'y > 0 and |rbar| < s'y the
    matrix is symmetric positive definite, so g'Bg > 0 for g != 0.
    """
    sty = float(s @ y)
    ss = float(s @ s)
    yy = float(y @ y)
    gg = float(g @ g)
    gts = float(g @ s)
    gty = float(g @ y)
    d = xi1 * yy / sty
    g_ybar = gty + rbar_val / ss * gts
    s_ybar = sty + rbar_val
    gBg = d * (gg - gts * gts / ss) + g_ybar * g_ybar / s_ybar
    return CurvatureInfo(sty=sty, rbar=rbar_val, ybar_dot_g=g_ybar, s_dot_ybar=s_ybar, gBg=gBg)


def cubic_root_stepsize(gnorm2, gnorm, quad, sigma):
    """Positive root of sigma*||g||^3 * a^2 + quad * a - ||g||^2 = 0.

    This is the exact minimizer of -a*||g||^2 + (quad/2)*a^2
    + (sigma/3)*||g||^3*a^3 over a > 0, written in the cancellation-free
    form 2*||g||^2 / (sqrt(quad^2 + 4*sigma*||g||^5) + quad).
    """
    disc = math.sqrt(quad * quad + 4.0 * sigma * gnorm2 * gnorm2 * gnorm)
    return 2.0 * gnorm2 / (disc + quad)


def aos1(gnorm2, gnorm, gBg, sigma, bb1_val, bb2_val):
    """Cubic-model stepsize for positive curvature, clamped to [BB2, BB1]."""
    a = cubic_root_stepsize(gnorm2, gnorm, gBg, sigma)
    return StepProposal(max(min(a, bb1_val), bb2_val), AOS1)


def aos2_fd(g, g_shifted, tau, sigma):
    """Cubic-model stepsize with finite-difference curvature |g'(g(x - tau*g) - g)|/tau.

    Used when s'y <= 0 and the gradients changed enough that the previous
    pair is uninformative; costs the caller one extra gradient evaluation.
    """
    gnorm2 = float(g @ g)
    h = abs(float(g @ (g_shifted - g)))
    a = cubic_root_stepsize(gnorm2, math.sqrt(gnorm2), h / tau, sigma)
    return StepProposal(a, AOS2A)


def aos2_prev(gnorm2, gnorm, abs_sty, alpha_prev, sigma):
    """Cubic-model stepsize with curvature |s'y|/alpha_prev^2 from the last step."""
    a = cubic_root_stepsize(gnorm2, gnorm, abs_sty / (alpha_prev * alpha_prev), sigma)
    return StepProposal(a, AOS2B)


def aos3(gnorm2, curvature, bb1_val, bb2_val):
    """Quadratic-model stepsize ||g||^2 / (g'Bg), clamped to [BB2, BB1]."""
    a = gnorm2 / curvature.gBg
    return StepProposal(max(min(a, bb1_val), bb2_val), AOS3)


def aos4(g, g_shifted, tau, s, y, alpha_prev, ratio, xi3, upsilon):
    """Stepsize for the near-quadratic, non-positive-curvature case.

    Uses a finite-difference Rayleigh quotient when the gradient shrank
    (ratio < xi3), the previous-step curvature |s'y| when the gradients
    are nearly collinear, and upsilon*alpha_prev as a total fallback.
    """
    gnorm2 = float(g @ g)
    if ratio < xi3 and g_shifted is not None:
        curv = float(g @ (g_shifted - g)) / tau
        if curv != 0.0 and math.isfinite(curv):
            return StepProposal(gnorm2 / abs(curv), AOS4A)
    sty = float(s @ y)
    if ratio >= xi3 and sty != 0.0:
        return StepProposal(gnorm2 * alpha_prev * alpha_prev / abs(sty), AOS4B)
    return StepProposal(upsilon * alpha_prev, AOS4C)


def default_tau(x, g):
    """Forward-difference step balancing truncation against roundoff."""
    return 1e-8 * (1.0 + float(np.max(np.abs(x)))) / max(1.0, float(np.max(np.abs(g))))


def choose_stepsize(state, config, problem, scratch=None):
    """Dispatch to the stepsize family for one iteration (k >= 1).

    Quadratic-closeness and the sign of s'y select the family:

    * far from quadratic, s'y > 0   -> aos1 (cubic model, rank-two curvature)
    * far from quadratic, s'y <= 0  -> aos2_fd / aos2_prev (special cubics)
    * close to quadratic, s'y > 0   -> aos3 (quadratic model)
    * close to quadratic, s'y <= 0  -> aos4

    The result is clamped to [lambda_min, lambda_max].  `scratch` carries
    per-iteration intermediates across regularization retries so the
    branch stays fixed and the extra finite-difference gradient (aos2_fd
    / aos4 first branch only) is evaluated at most once per iteration.
    """
    m = state.memory
    if scratch is None:
        scratch = {}
    g = state.g
    gnorm2 = state.gnorm2
    gnorm = math.sqrt(gnorm2)
    if "sty" not in scratch:
        scratch["sty"] = float(m.s @ m.y)
        scratch["mu"] = mu(m.f_prev, state.f, g, m.s, m.y)
        scratch["ratio"] = float(m.g_prev @ m.g_prev) / gnorm2
    sty = scratch["sty"]
    ratio = scratch["ratio"]
    sigma = state.reg.sigma

    if not near_quadratic(scratch["mu"], m.mu_prev, config.c1, config.c2):
        if sty > 0.0:
            if "curv" not in scratch:
                rb = rbar(m.f_prev, state.f, m.g_prev, g, m.s, sty, config.eta_bar1)
                scratch["curv"] = quad_form_B(g, m.s, m.y, rb, config.xi1)
                scratch["bb1"] = bb1(m.s, m.y)
                scratch["bb2"] = bb2(m.s, m.y)
            prop = aos1(gnorm2, gnorm, scratch["curv"].gBg, sigma, scratch["bb1"], scratch["bb2"])
        elif ratio < config.xi2:
            _shifted_gradient(state, problem, scratch)
            prop = aos2_fd(g, scratch["g_shifted"], scratch["tau"], sigma)
        else:
            prop = aos2_prev(gnorm2, gnorm, abs(sty), m.alpha_prev, sigma)
    else:
        if sty > 0.0:
            if "curv" not in scratch:
                rb = rbar(m.f_prev, state.f, m.g_prev, g, m.s, sty, config.eta_bar1)
                scratch["curv"] = quad_form_B(g, m.s, m.y, rb, config.xi1)
                scratch["bb1"] = bb1(m.s, m.y)
                scratch["bb2"] = bb2(m.s, m.y)
            prop = aos3(gnorm2, scratch["curv"], scratch["bb1"], scratch["bb2"])
        else:
            if ratio < config.xi3:
                _shifted_gradient(state, problem, scratch)
            prop = aos4(g, scratch.get("g_shifted"), scratch.get("tau"), m.s, m.y,
                        m.alpha_prev, ratio, config.xi3, config.upsilon)
    alpha = max(min(prop.alpha, config.lambda_max), config.lambda_min)
    return StepProposal(alpha, prop.branch)


def _shifted_gradient(state, problem, scratch):
    # one extra gradient evaluation per iteration, shared across retries
    if "g_shifted" not in scratch:
        scratch["tau"] = default_tau(state.x, state.g)
        scratch["g_shifted"] = gradient(problem, state.x - scratch["tau"] * state.g,
                                        state.counters)
