import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from betalogistic import inference as inf
from betalogistic.distribution import ThetaPoint, log_sech, potential, sample
from betalogistic.errors import DomainError
from betalogistic.geometry import fisher
from conftest import theta_grid

PI2 = math.pi**2


@pytest.fixture(scope="module")
def data200():
    return inf.suff_stats(sample((2.0, 0.5), 200, seed=7))


@pytest.fixture(scope="module")
def data_large():
    return inf.suff_stats(sample((3.0, 1.0), 10_000, seed=20240611))


# sufficient statistics ------------------------------------------------------------------


def test_suff_stats_examples():
    s = inf.suff_stats([0.0])
    assert (s.n, s.log_a, s.b) == (1, 0.0, 0.0)
    s = inf.suff_stats([1.0, -1.0])
    assert s.n == 2 and s.b == 0.0
    assert s.log_a == pytest.approx(2 * math.log(2 / (math.e + 1 / math.e)), rel=1e-15)
    assert s.log_a == pytest.approx(-0.8668, abs=1e-3)


@given(xs=st.lists(st.floats(-50, 50), min_size=1, max_size=30), seed=st.integers(0, 1000))
def test_suff_stats_permutation_invariant(xs, seed):
    perm = list(np.random.default_rng(seed).permutation(xs))
    assert inf.suff_stats(xs) == inf.suff_stats(perm)


def test_suff_stats_overflow_safe():
    s = inf.suff_stats([1e6, -1e6, 800.0])
    assert math.isfinite(s.log_a) and s.b == 800.0


@pytest.mark.parametrize("bad", [[], [math.nan], [math.inf, 1.0]])
def test_suff_stats_errors(bad):
    with pytest.raises(DomainError):
        inf.suff_stats(bad)


def test_stats_and_config_validation():
    with pytest.raises(DomainError):
        inf.SufficientStats(0, 0.0, 0.0)
    with pytest.raises(DomainError):
        inf.SufficientStats(3, 0.1, 0.0)
    for kw in (dict(grad_tol=0.0), dict(max_iter=0), dict(backtrack_ratio=1.0), dict(backtrack_ratio=0.0)):
        with pytest.raises(DomainError):
            inf.SolverConfig(**kw)


# prior and posterior ---------------------------------------------------------------------


def test_prior_examples():
    for p in theta_grid():
        assert inf.alpha_prior_log(p, 1.0) == 0.0
        assert inf.alpha_prior_log(p, -1.0) == pytest.approx(math.log(fisher(p).det), rel=1e-14)
    expected = 0.5 * math.log((1 - PI2 / 12) * PI2 / 12)
    assert inf.alpha_prior_log((2, 0), 0.0) == pytest.approx(expected, rel=1e-14)
    assert inf.alpha_prior_log((2, 0), 0.0) == pytest.approx(-0.96231, abs=1e-3)


@given(alpha=st.floats(-5, 5), t1=st.floats(0.2, 20), r=st.floats(-0.9, 0.9))
def test_prior_affine_in_alpha(alpha, t1, r):
    p = (t1, t1 * r)
    slope = -0.5 * math.log(fisher(p).det)
    assert inf.alpha_prior_log(p, alpha) == pytest.approx(inf.alpha_prior_log(p, 0.0) + alpha * slope, rel=1e-12, abs=1e-12)


def test_log_posterior_formula(data200):
    s, p = data200, ThetaPoint(2.3, 0.4)
    direct = (
        s.n * (1 - p.theta1) * math.log(2)
        + p.theta1 * s.log_a
        + p.theta2 * s.b
        - s.n * math.log(math.gamma(p.beta_minus) * math.gamma(p.beta_plus) / math.gamma(p.theta1))
        + 0.5 * math.log(fisher(p).det)
    )
    assert inf.log_posterior_unnorm(s, p, 0.0) == pytest.approx(direct, rel=1e-12)
    # at alpha = 1 it is the log-likelihood up to -sum ln ... constants
    assert inf.log_posterior_unnorm(s, p, 1.0) == pytest.approx(p.theta1 * s.log_a + p.theta2 * s.b - s.n * potential(p), rel=1e-13)


def test_posterior_grid_matches_pointwise(data200):
    t1 = np.array([[0.5, 2.0], [3.0, 1.0]])
    t2 = np.array([[0.1, -1.5], [3.5, 0.0]])
    grid = inf.log_posterior_grid(data200, t1, t2, -1.0)
    assert grid[1, 0] == -np.inf
    for i, j in [(0, 0), (0, 1), (1, 1)]:
        assert grid[i, j] == pytest.approx(inf.log_posterior_unnorm(data200, (t1[i, j], t2[i, j]), -1.0), rel=1e-12)


# gradient -------------------------------------------------------------------------------


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 1.0, 2.5])
def test_gradient_matches_finite_differences(data200, alpha):
    rng = np.random.default_rng(99)
    for _ in range(5):
        t1 = rng.uniform(0.5, 8.0)
        p = (t1, t1 * rng.uniform(-0.8, 0.8))
        g = inf.posterior_gradient(data200, p, alpha)
        h = 1e-3 * min(p[0] + p[1], p[0] - p[1])
        for i in range(2):
            e = np.eye(2)[i] * h
            f = lambda k: inf.log_posterior_unnorm(data200, (p[0] + k * e[0], p[1] + k * e[1]), alpha)
            fd = (8 * (f(1) - f(-1)) - (f(2) - f(-2))) / (12 * h)
            assert abs(g[i] - fd) <= 1e-7 * max(1.0, abs(fd))


@pytest.mark.parametrize("p", theta_grid()[::4])
def test_log_det_gradient_fd(p):
    h = 1e-4 * min(p[0] + p[1], p[0] - p[1])
    ld = lambda q: math.log(fisher(q).det)
    fd = [(ld((p[0] + h, p[1])) - ld((p[0] - h, p[1]))) / (2 * h), (ld((p[0], p[1] + h)) - ld((p[0], p[1] - h))) / (2 * h)]
    np.testing.assert_allclose(inf.log_det_gradient(p), fd, rtol=1e-6, atol=1e-8)


def test_symmetric_data_gradient():
    s = inf.suff_stats([0.3, -0.3, 1.7, -1.7, 0.0])
    for t1 in (0.5, 2.0, 6.0):
        assert inf.posterior_gradient(s, (t1, 0.0), 1.0)[1] == pytest.approx(0.0, abs=1e-12)


def test_hessian_matches_fd_of_gradient(data200):
    p = (2.2, 0.6)
    H = inf.posterior_hessian(data200, p, 0.0)
    h = 1e-5
    for j in range(2):
        e = np.eye(2)[j] * h
        col = (inf.posterior_gradient(data200, p + e, 0.0) - inf.posterior_gradient(data200, p - e, 0.0)) / (2 * h)
        np.testing.assert_allclose(H[:, j], col, rtol=1e-5)


# MAP ------------------------------------------------------------------------------------


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 1.0])
def test_map_recovers_truth(data_large, alpha):
    est = inf.map_estimate(data_large, alpha)
    assert est.converged and est.grad_norm <= 1e-8
    assert abs(est.theta_hat.theta1 - 3.0) <= 0.15
    assert abs(est.theta_hat.theta2 - 1.0) <= 0.15


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 1.0])
def test_map_matches_grid_argmax(data200, alpha):
    est = inf.map_estimate(data200, alpha)
    assert est.converged
    c1, c2 = np.round(est.theta_hat.as_array(), 2)
    t1, t2 = np.meshgrid(c1 + 0.01 * np.arange(-60, 61), c2 + 0.01 * np.arange(-60, 61), indexing="ij")
    L = inf.log_posterior_grid(data200, t1, t2, alpha)
    i = np.unravel_index(np.argmax(L), L.shape)
    assert 0 < i[0] < 120 and 0 < i[1] < 120  # the maximum is interior to the window
    assert max(abs(est.theta_hat.theta1 - t1[i]), abs(est.theta_hat.theta2 - t2[i])) <= 0.01


def test_map_symmetric_data():
    xs = np.concatenate([sample((2.5, 0.0), 300, seed=5)])
    s = inf.suff_stats(np.concatenate([xs, -xs]))
    est = inf.mle(s)
    assert est.converged
    assert abs(est.theta_hat.theta2) <= 1e-8


def test_alpha_sweep_continuous_and_mle(data200):
    alphas = np.linspace(-1.0, 1.0, 11)
    ests = [inf.map_estimate(data200, a) for a in alphas]
    assert all(e.converged for e in ests)
    th = np.array([e.theta_hat.as_array() for e in ests])
    assert np.max(np.abs(np.diff(th, axis=0))) < 0.1
    m = inf.mle(data200)
    np.testing.assert_array_equal(m.theta_hat.as_array(), th[-1])
    assert m.alpha == 1.0


def test_map_from_poor_start(data200):
    est = inf.map_estimate(data200, 0.0, inf.SolverConfig(init=ThetaPoint(40.0, -39.0)))
    ref = inf.map_estimate(data200, 0.0)
    assert est.converged
    np.testing.assert_allclose(est.theta_hat.as_array(), ref.theta_hat.as_array(), atol=1e-6)


def test_line_search_monotone(data200, monkeypatch):
    # record l at every accepted iterate
    seen = []
    orig = inf._uv_derivatives

    def spy(s, w, alpha):
        out = orig(s, w, alpha)
        seen.append(inf.log_posterior_unnorm(s, out[0], alpha))
        return out

    monkeypatch.setattr(inf, "_uv_derivatives", spy)
    inf.map_estimate(data200, -1.0, inf.SolverConfig(init=ThetaPoint(10.0, 9.0)))
    assert len(seen) > 2
    assert all(b >= a for a, b in zip(seen, seen[1:]))


def test_iterates_stay_in_domain(data200, monkeypatch):
    orig = inf._theta_from_uv
    pts = []

    def spy(w):
        p = orig(w)
        pts.append(p)
        return p

    monkeypatch.setattr(inf, "_theta_from_uv", spy)
    inf.map_estimate(data200, 0.5, inf.SolverConfig(init=ThetaPoint(0.2, -0.19)))
    assert pts and all(p.theta1 > abs(p.theta2) for p in pts)


def test_single_observation_reports_nonconvergence():
    s = inf.suff_stats([0.4])
    with pytest.warns(UserWarning, match="degenerate"):
        est = inf.mle(s, inf.SolverConfig(max_iter=30))
    assert not est.converged
    assert math.isfinite(est.grad_norm)


def test_degenerate_detection():
    assert inf.is_degenerate(inf.suff_stats([1.5] * 10))
    assert inf.is_degenerate(inf.suff_stats([2.0]))
    assert not inf.is_degenerate(inf.suff_stats([1.5, 1.6]))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        inf.map_estimate(inf.suff_stats(sample((2, 0), 50, seed=1)), 0.0)


def test_method_of_moments_start(data_large):
    p = inf.method_of_moments_start(data_large)
    assert abs(p.theta1 - 3.0) < 0.5 and abs(p.theta2 - 1.0) < 0.5


def test_map_estimate_dict(data200):
    d = inf.map_estimate(data200, 0.0).as_dict()
    assert set(d) >= {"theta1", "theta2", "alpha", "converged", "iterations", "grad_norm", "log_post_unnorm"}


def test_alpha_must_be_finite(data200):
    with pytest.raises(DomainError):
        inf.map_estimate(data200, math.nan)
