"""Stepsize engine: BB pair, curvature form, model stepsizes, dispatch."""

import math

import numpy as np
import pytest

from aosgrad import SolverConfig, choose_stepsize, make_problem
from aosgrad.stepsize import (
    aos1,
    aos2_fd,
    aos2_prev,
    aos3,
    aos4,
    bb1,
    bb2,
    cubic_root_stepsize,
    mu,
    near_quadratic,
    quad_form_B,
    rbar,
)

from oracles import (
    assemble_B,
    build_state,
    cubic_model,
    golden_section,
    make_memory,
    positive_quadratic_root,
    random_curvature_pair,
    random_spd_quadratic_data,
)


class TestBBPair:
    def test_identity_case(self):
        s = np.array([1.0, 0.0])
        y = np.array([1.0, 0.0])
        assert bb1(s, y) == 1.0
        assert bb2(s, y) == 1.0

    def test_direct_substitution(self):
        # parallel pair: Cauchy-Schwarz is tight, so BB1 = BB2 = 2
        s = np.array([2.0, 0.0])
        y = np.array([1.0, 0.0])
        assert bb1(s, y) == 2.0
        assert bb2(s, y) == 2.0

    def test_quadratic_hessian_pair(self):
        # y = A s with A = diag(1, 3)
        s = np.array([1.0, 1.0])
        y = np.array([1.0, 3.0])
        assert bb1(s, y) == pytest.approx(0.5)
        assert bb2(s, y) == pytest.approx(0.4)

    def test_bb2_never_exceeds_bb1(self):
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 1000:
            s = rng.normal(size=8)
            y = rng.normal(size=8)
            if s @ y <= 0:
                continue
            assert bb2(s, y) <= bb1(s, y) * (1 + 1e-12)
            checked += 1


class TestMu:
    def test_zero_on_exact_quadratics(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            f_prev, f_cur, _, g_cur, s, y = random_spd_quadratic_data(rng, 6)
            assert mu(f_prev, f_cur, g_cur, s, y) <= 1e-10

    def test_quartic_example(self):
        # f(x) = x^4, x_prev = 1, x_cur = 0
        val = mu(1.0, 0.0, np.array([0.0]), np.array([-1.0]), np.array([-4.0]))
        assert val == pytest.approx(0.5)

    def test_degenerate_pair_gives_sentinel(self):
        s = np.array([1.0, 0.0])
        y = np.array([0.0, 1.0])
        assert mu(0.0, 0.0, np.zeros(2), s, y) == math.inf


class TestNearQuadratic:
    def test_tiny_mu_passes_first_clause(self):
        assert near_quadratic(1e-9, None, 1e-8, 0.07)

    def test_pairwise_clause(self):
        assert near_quadratic(0.05, 0.06, 1e-8, 0.07)

    def test_absent_previous_blocks_second_clause(self):
        assert not near_quadratic(0.05, None, 1e-8, 0.07)

    def test_sentinel_never_passes(self):
        assert not near_quadratic(math.inf, 0.0, 1e-8, 0.07)


class TestRbar:
    def test_zero_on_exact_quadratics(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            f_prev, f_cur, g_prev, g_cur, s, y = random_spd_quadratic_data(rng, 5)
            sty = float(s @ y)
            scale = abs(f_prev) + abs(f_cur) + float(np.abs(g_cur).sum())
            assert abs(rbar(f_prev, f_cur, g_prev, g_cur, s, sty, 0.05)) <= 1e-9 * scale

    def test_clamps_at_upper_bound(self):
        # raw = 3*(g+g_prev)'s + 6*(f_prev-f) = 10, bound = 0.05*4 = 0.2
        s = np.array([1.0])
        g_cur = np.array([2.0])
        g_prev = np.array([4.0 / 3.0])
        assert rbar(0.0, 0.0, g_prev, g_cur, s, 4.0, 0.05) == pytest.approx(0.2)

    def test_clamps_at_lower_bound(self):
        s = np.array([1.0])
        g_cur = np.array([-2.0])
        g_prev = np.array([-4.0 / 3.0])
        assert rbar(0.0, 0.0, g_prev, g_cur, s, 4.0, 0.05) == pytest.approx(-0.2)

    def test_bound_invariant(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            s = rng.normal(size=4)
            y = rng.normal(size=4)
            sty = float(s @ y)
            if sty <= 0:
                continue
            val = rbar(rng.normal(), rng.normal(), rng.normal(size=4),
                       rng.normal(size=4), s, sty, 0.05)
            assert abs(val) <= 0.05 * sty * (1 + 1e-12)


class TestQuadFormB:
    def test_orthogonal_case(self):
        s = np.array([1.0, 0.0])
        y = np.array([1.0, 0.0])
        g = np.array([0.0, 1.0])
        info = quad_form_B(g, s, y, 0.0, 1.07)
        assert info.gBg == pytest.approx(1.07)
        assert info.sty == 1.0
        assert info.s_dot_ybar == 1.0

    def test_parallel_gradient_annihilates_first_term(self):
        rng = np.random.default_rng(5)
        s = rng.normal(size=4)
        y = s + 0.2 * rng.normal(size=4)
        if s @ y <= 0:
            y = s.copy()
        g = 2.0 * s
        info = quad_form_B(g, s, y, 0.0, 1.07)
        expected = info.ybar_dot_g ** 2 / info.s_dot_ybar
        assert info.gBg == pytest.approx(expected, rel=1e-10)

    def test_matches_dense_assembly(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            n = rng.integers(2, 11)
            s, y, rb = random_curvature_pair(rng, n)
            g = rng.normal(size=n)
            info = quad_form_B(g, s, y, rb, 1.07)
            B = assemble_B(s, y, rb, 1.07)
            assert info.gBg == pytest.approx(float(g @ B @ g), rel=1e-12, abs=1e-300)

    def test_dense_matrix_is_positive_definite(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            n = rng.integers(2, 11)
            s, y, rb = random_curvature_pair(rng, n)
            B = assemble_B(s, y, rb, 1.07)
            assert np.linalg.eigvalsh(B).min() > 0.0
            assert float(s @ (y + rb / (s @ s) * s)) > 0.0


class TestAos1:
    def test_sigma_zero_reduces_to_quadratic_step(self):
        # the cubic term off: root is ||g||^2 / gBg = 4/2 = 2
        prop = aos1(4.0, 2.0, 2.0, 0.0, 1e9, 1e-9)
        assert prop.alpha == pytest.approx(2.0)
        assert prop.branch == "AOS1"

    def test_arithmetic_substitution(self):
        # ||g|| = 1, gBg = 1, sigma = 3/4: 2/(sqrt(1+3)+1) = 2/3
        prop = aos1(1.0, 1.0, 1.0, 0.75, 1e9, 1e-9)
        assert prop.alpha == pytest.approx(2.0 / 3.0)

    def test_upper_clamp(self):
        # unclamped root 5 with window [0.5, 2]
        prop = aos1(10.0, math.sqrt(10.0), 2.0, 0.0, 2.0, 0.5)
        assert prop.alpha == 2.0

    def test_root_solves_the_stationarity_equation(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            gnorm2 = rng.uniform(0.1, 10.0)
            gnorm = math.sqrt(gnorm2)
            gBg = rng.uniform(0.01, 10.0)
            sigma = rng.uniform(1e-3, 1e3)
            a = cubic_root_stepsize(gnorm2, gnorm, gBg, sigma)
            oracle = positive_quadratic_root(sigma * gnorm2 * gnorm, gBg, -gnorm2)
            assert a == pytest.approx(oracle, rel=1e-10)

    def test_unclamped_root_minimizes_cubic_model(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            gnorm2 = rng.uniform(0.1, 10.0)
            gBg = rng.uniform(0.01, 10.0)
            sigma = rng.uniform(1e-3, 1e3)
            a = cubic_root_stepsize(gnorm2, math.sqrt(gnorm2), gBg, sigma)
            best = golden_section(cubic_model(gnorm2, gBg, sigma), 1e-12, 1e6)
            assert abs(a - best) <= 1e-6 * (1.0 + a)


class TestAos2:
    def test_fd_closed_form_on_identity_hessian_data(self):
        # g(x) = x: g_shifted - g = -tau*g, so the curvature is ||g||^2
        g = np.array([2.0, 0.0])
        tau = 0.5
        g_shifted = g - tau * g
        prop = aos2_fd(g, g_shifted, tau, 3.0)
        assert prop.alpha == pytest.approx(1.0 / 3.0)
        assert prop.branch == "AOS2a"

    def test_fd_flat_curvature(self):
        g = np.array([1.0, 0.0])
        prop = aos2_fd(g, g.copy(), 1.0, 1.0)
        assert prop.alpha == pytest.approx(1.0)

    def test_fd_matches_root_oracle(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            n = rng.integers(2, 8)
            g = rng.normal(size=n)
            g_shifted = g + rng.normal(size=n) * 0.1
            tau = rng.uniform(1e-8, 1e-2)
            sigma = rng.uniform(1e-2, 1e2)
            gnorm2 = float(g @ g)
            h = abs(float(g @ (g_shifted - g)))
            oracle = positive_quadratic_root(sigma * gnorm2 * math.sqrt(gnorm2),
                                             h / tau, -gnorm2)
            assert aos2_fd(g, g_shifted, tau, sigma).alpha == pytest.approx(oracle, rel=1e-10)

    def test_prev_degenerate_pair(self):
        prop = aos2_prev(1.0, 1.0, 0.0, 1.0, 1.0)
        assert prop.alpha == pytest.approx(1.0)
        assert prop.branch == "AOS2b"

    def test_prev_sigma_zero(self):
        assert aos2_prev(1.0, 1.0, 2.0, 1.0, 0.0).alpha == pytest.approx(0.5)

    def test_prev_matches_root_oracle(self):
        rng = np.random.default_rng(37)
        for _ in range(50):
            gnorm2 = rng.uniform(0.1, 10.0)
            abs_sty = rng.uniform(0.0, 5.0)
            alpha_prev = rng.uniform(1e-3, 10.0)
            sigma = rng.uniform(1e-2, 1e2)
            oracle = positive_quadratic_root(sigma * gnorm2 * math.sqrt(gnorm2),
                                             abs_sty / alpha_prev ** 2, -gnorm2)
            got = aos2_prev(gnorm2, math.sqrt(gnorm2), abs_sty, alpha_prev, sigma).alpha
            assert got == pytest.approx(oracle, rel=1e-10)


class TestAos3:
    def test_quadratic_step(self):
        info = quad_form_B(np.array([2.0, 0.0]), np.array([1.0, 0.0]),
                           np.array([1.0, 0.0]), 0.0, 1.0)
        assert info.gBg == pytest.approx(4.0)
        prop = aos3(4.0, info, 1e9, 1e-9)
        assert prop.alpha == pytest.approx(1.0)
        assert prop.branch == "AOS3"

    def test_identity_hessian_data_is_clamped_to_unit_step(self):
        # y = s makes BB1 = BB2 = 1, so any g lands on 1
        rng = np.random.default_rng(41)
        s = rng.normal(size=5)
        g = rng.normal(size=5)
        info = quad_form_B(g, s, s, 0.0, 1.07)
        prop = aos3(float(g @ g), info, bb1(s, s), bb2(s, s))
        assert prop.alpha == pytest.approx(1.0)

    def test_lower_clamp(self):
        info = quad_form_B(np.array([0.0, 1.0]), np.array([1.0, 0.0]),
                           np.array([2.0, 0.0]), 0.0, 1.0)
        # unclamped 0.2/gBg is tiny; window [0.5, 2]
        prop = aos3(0.2, info, 2.0, 0.5)
        assert prop.alpha == 0.5


class TestAos4:
    def test_identity_hessian_rayleigh_branch(self):
        g = np.array([1.0, 1.0])
        tau = 0.25
        g_shifted = g - tau * g
        prop = aos4(g, g_shifted, tau, np.array([1.0, 0.0]), np.array([-1.0, 0.0]),
                    alpha_prev=1.0, ratio=0.1, xi3=0.85, upsilon=10.0)
        assert prop.branch == "AOS4a"
        assert prop.alpha == pytest.approx(1.0)

    def test_previous_pair_branch(self):
        g = np.array([2.0, 0.0])
        s = np.array([2.0, 0.0])
        y = np.array([1.0, 0.0])
        prop = aos4(g, None, None, s, y, alpha_prev=0.5, ratio=1.0, xi3=0.85,
                    upsilon=10.0)
        assert prop.branch == "AOS4b"
        assert prop.alpha == pytest.approx(0.5)

    def test_fallback_branch(self):
        g = np.array([1.0, 0.0])
        s = np.array([1.0, 0.0])
        y = np.array([0.0, 1.0])  # s'y = 0
        prop = aos4(g, None, None, s, y, alpha_prev=0.2, ratio=1.0, xi3=0.85,
                    upsilon=10.0)
        assert prop.branch == "AOS4c"
        assert prop.alpha == pytest.approx(2.0)

    def test_flat_rayleigh_falls_through_to_fallback(self):
        g = np.array([1.0, 0.0])
        prop = aos4(g, g.copy(), 1e-6, np.array([1.0, 0.0]), np.array([-1.0, 0.0]),
                    alpha_prev=0.3, ratio=0.1, xi3=0.85, upsilon=10.0)
        assert prop.branch == "AOS4c"
        assert prop.alpha == pytest.approx(3.0)


class TestDispatch:
    def test_far_from_quadratic_positive_curvature(self):
        # mu = 0.5 fails the closeness test, s'y = 1 > 0
        memory = make_memory(s=[1.0, 0.0], y=[1.0, 0.0], f_prev=0.25,
                             g_prev=[1.0, 0.0])
        state = build_state([1.0, 1.0], 0.0, [0.5, 0.3], memory)
        prop = choose_stepsize(state, SolverConfig(), make_problem("sphere", 2))
        assert prop.branch == "AOS1"

    def test_far_from_quadratic_negative_curvature_small_ratio(self):
        # s'y = -1, ||g_prev||^2/||g||^2 = 0.01 < 0.85
        memory = make_memory(s=[1.0, 0.0], y=[-1.0, 0.0], f_prev=-1.25,
                             g_prev=[0.1, 0.0])
        state = build_state([1.0, 0.0], 0.0, [1.0, 0.0], memory)
        problem = make_problem("sphere", 2)
        prop = choose_stepsize(state, SolverConfig(), problem)
        assert prop.branch == "AOS2a"
        assert state.counters.ng == 1  # one finite-difference gradient

    def test_far_from_quadratic_negative_curvature_large_ratio(self):
        memory = make_memory(s=[1.0, 0.0], y=[-1.0, 0.0], f_prev=-1.25,
                             g_prev=[1.0, 0.0])
        state = build_state([1.0, 0.0], 0.0, [1.0, 0.0], memory)
        prop = choose_stepsize(state, SolverConfig(), make_problem("sphere", 2))
        assert prop.branch == "AOS2b"
        assert state.counters.ng == 0

    def test_near_quadratic_positive_curvature(self):
        # mu = 0 <= c1
        memory = make_memory(s=[1.0, 0.0], y=[1.0, 0.0], f_prev=0.0,
                             g_prev=[1.0, 0.0])
        state = build_state([1.0, 1.0], 0.0, [0.5, 0.3], memory)
        prop = choose_stepsize(state, SolverConfig(), make_problem("sphere", 2))
        assert prop.branch == "AOS3"

    def test_near_quadratic_negative_curvature(self):
        # mu = 0 with s'y = -1; collinear gradients pick the previous-pair form
        memory = make_memory(s=[1.0, 0.0], y=[-1.0, 0.0], f_prev=-1.5,
                             g_prev=[1.0, 0.0])
        state = build_state([1.0, 0.0], 0.0, [1.0, 0.0], memory)
        prop = choose_stepsize(state, SolverConfig(), make_problem("sphere", 2))
        assert prop.branch == "AOS4b"

    def test_zero_pair_routes_to_nonpositive_branch(self):
        memory = make_memory(s=[1.0, 0.0], y=[0.0, 1.0], f_prev=0.0,
                             g_prev=[1.0, 0.0])
        state = build_state([1.0, 0.0], 0.0, [1.0, 0.0], memory)
        prop = choose_stepsize(state, SolverConfig(), make_problem("sphere", 2))
        assert prop.branch == "AOS2b"

    def test_result_respects_stepsize_clamp(self):
        config = SolverConfig(lambda_max=0.001)
        memory = make_memory(s=[1.0, 0.0], y=[1.0, 0.0], f_prev=0.25,
                             g_prev=[1.0, 0.0])
        state = build_state([1.0, 1.0], 0.0, [0.5, 0.3], memory, config=config)
        prop = choose_stepsize(state, config, make_problem("sphere", 2))
        assert prop.alpha == 0.001

    def test_retries_reuse_the_shifted_gradient(self):
        memory = make_memory(s=[1.0, 0.0], y=[-1.0, 0.0], f_prev=-1.25,
                             g_prev=[0.1, 0.0])
        state = build_state([1.0, 0.0], 0.0, [1.0, 0.0], memory)
        problem = make_problem("sphere", 2)
        scratch = {}
        first = choose_stepsize(state, SolverConfig(), problem, scratch)
        state.reg.sigma *= 5.625
        second = choose_stepsize(state, SolverConfig(), problem, scratch)
        assert state.counters.ng == 1
        assert first.branch == second.branch == "AOS2a"
        assert second.alpha < first.alpha  # larger sigma shortens the step


class TestClampInvariants:
    def test_aos1_aos3_always_inside_bb_window(self):
        rng = np.random.default_rng(43)
        checked = 0
        while checked < 1000:
            n = rng.integers(2, 9)
            s, y, rb = random_curvature_pair(rng, n)
            g = rng.normal(size=n)
            gnorm2 = float(g @ g)
            if gnorm2 == 0.0:
                continue
            lo, hi = bb2(s, y), bb1(s, y)
            info = quad_form_B(g, s, y, rb, 1.07)
            sigma = rng.uniform(0.0, 100.0)
            a1 = aos1(gnorm2, math.sqrt(gnorm2), info.gBg, sigma, hi, lo).alpha
            a3 = aos3(gnorm2, info, hi, lo).alpha
            for a in (a1, a3):
                assert lo <= a <= hi
                assert math.isfinite(a) and a > 0
            checked += 1

    def test_all_families_return_finite_positive_steps(self):
        rng = np.random.default_rng(47)
        for _ in range(200):
            gnorm2 = rng.uniform(1e-6, 1e6)
            gnorm = math.sqrt(gnorm2)
            sigma = rng.uniform(1e-6, 1e6)
            a = cubic_root_stepsize(gnorm2, gnorm, rng.uniform(0.0, 1e3), sigma)
            assert math.isfinite(a) and a > 0
            b = aos2_prev(gnorm2, gnorm, rng.uniform(0.0, 10.0),
                          rng.uniform(1e-6, 10.0), sigma).alpha
            assert math.isfinite(b) and b > 0
