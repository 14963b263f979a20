"""Posterior inference for the beta-logistic family under alpha-parallel priors.

For i.i.d. data the log-likelihood depends on two sufficient statistics,
log_a = sum ln sech(x_i) and b = sum x_i:

    l(theta) = theta1 log_a + theta2 b - N phi(theta)

and the alpha-parallel prior adds ((1 - alpha)/2) ln det G.  alpha = 1 is
the flat prior (MLE), alpha = 0 Jeffreys.  The MAP solver works in
(u, v) = (ln(theta1 - theta2), ln(theta1 + theta2)) so every iterate is a
valid parameter.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import specfun
from .distribution import LN2, ThetaPoint, as_point, log_sech
from .errors import DomainError
from .geometry import _fisher_from, _polygammas, fisher

_ARMIJO_C = 1e-4
_MAX_UV_STEP = 4.0
_FD_REL_STEP = 1e-5


@dataclass(frozen=True)
class SufficientStats:
    n: int
    log_a: float
    b: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("need at least one observation")
        if self.log_a > 0:
            raise DomainError(f"log_a must be <= 0, got {self.log_a}")


def suff_stats(xs: Sequence[float]) -> SufficientStats:
    x = np.asarray(xs, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("observation sequence is empty")
    if not np.all(np.isfinite(x)):
        raise DomainError("observations must be finite")
    return SufficientStats(int(x.size), math.fsum(np.atleast_1d(log_sech(x))), math.fsum(x))


@dataclass(frozen=True)
class SolverConfig:
    grad_tol: float = 1e-8
    max_iter: int = 100
    init: ThetaPoint | None = None  # None: method-of-moments start
    backtrack_ratio: float = 0.5

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise DomainError("grad_tol must be > 0")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError("max_iter must be an integer >= 1")
        if not 0 < self.backtrack_ratio < 1:
            raise DomainError("backtrack_ratio must lie in (0, 1)")
        if self.init is not None:
            object.__setattr__(self, "init", as_point(self.init))


@dataclass(frozen=True)
class MapEstimate:
    theta_hat: ThetaPoint
    alpha: float
    converged: bool
    iterations: int
    grad_norm: float
    log_post_unnorm: float

    def as_dict(self) -> dict:
        return {
            "theta1": self.theta_hat.theta1,
            "theta2": self.theta_hat.theta2,
            "alpha": self.alpha,
            "converged": self.converged,
            "iterations": self.iterations,
            "grad_norm": self.grad_norm,
            "log_post_unnorm": self.log_post_unnorm,
        }


# objective ----------------------------------------------------------------


def _check_alpha(alpha) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise DomainError("alpha must be finite")
    return alpha


def _log_det_grid(t1, t2):
    bp, bm = 0.5 * (t1 + t2), 0.5 * (t1 - t2)
    a, b, c = (specfun.polygamma(1, z) for z in (bp, bm, t1))
    return np.log(0.25 * (a * b - c * (a + b)))


def log_posterior_grid(s: SufficientStats, theta1, theta2, alpha: float) -> np.ndarray:
    """Vectorized l_alpha over arrays of (theta1, theta2); -inf off the domain."""
    alpha = _check_alpha(alpha)
    t1, t2 = np.broadcast_arrays(np.asarray(theta1, dtype=float), np.asarray(theta2, dtype=float))
    ok = (t1 + t2 > 0) & (t1 - t2 > 0)
    # evaluate at a harmless stand-in where invalid, then mask
    t1 = np.where(ok, t1, 2.0)
    t2 = np.where(ok, t2, 0.0)
    bp, bm = 0.5 * (t1 + t2), 0.5 * (t1 - t2)
    out = s.n * (1.0 - t1) * LN2 + t1 * s.log_a + t2 * s.b - s.n * specfun.log_beta(bm, bp)
    if alpha != 1.0:
        out = out + 0.5 * (1.0 - alpha) * _log_det_grid(t1, t2)
    return np.where(ok, out, -np.inf)


def alpha_prior_log(p, alpha: float) -> float:
    """ln of the alpha-parallel prior (det G)^((1 - alpha)/2)."""
    alpha = _check_alpha(alpha)
    if alpha == 1.0:
        as_point(p)
        return 0.0
    return 0.5 * (1.0 - alpha) * math.log(fisher(p).det)


def log_posterior_unnorm(s: SufficientStats, p, alpha: float) -> float:
    p = as_point(p)
    return float(log_posterior_grid(s, p.theta1, p.theta2, alpha))


def log_det_gradient(p) -> np.ndarray:
    """d ln det G / d theta_i = dD/d theta_i / D (product rule through the psi' terms)."""
    q = _polygammas(as_point(p))
    a, b, c, a2, b2, c2, D = q.a, q.b, q.c, q.a2, q.b2, q.c2, q.D
    d1 = 0.5 * a2 * b + 0.5 * a * b2 - c2 * (a + b) - 0.5 * c * (a2 + b2)
    d2 = 0.5 * a2 * b - 0.5 * a * b2 - 0.5 * c * (a2 - b2)
    return np.array([d1 / D, d2 / D])


def posterior_gradient(s: SufficientStats, p, alpha: float) -> np.ndarray:
    p = as_point(p)
    alpha = _check_alpha(alpha)
    dp, dm, d1 = (float(v) for v in specfun.digamma(np.array([p.beta_plus, p.beta_minus, p.theta1])))
    g = np.array(
        [
            s.log_a - s.n * LN2 - 0.5 * s.n * (dp + dm - 2.0 * d1),
            s.b - 0.5 * s.n * (dp - dm),
        ]
    )
    if alpha != 1.0:
        g = g + 0.5 * (1.0 - alpha) * log_det_gradient(p)
    return g


def _log_det_hessian(p: ThetaPoint) -> np.ndarray:
    # central differences of the analytic gradient
    H = np.empty((2, 2))
    x = p.as_array()
    for i in range(2):
        h = _FD_REL_STEP * min(p.beta_plus, p.beta_minus)
        e = np.zeros(2)
        e[i] = h
        H[i] = (log_det_gradient(tuple(x + e)) - log_det_gradient(tuple(x - e))) / (2.0 * h)
    return 0.5 * (H + H.T)


def posterior_hessian(s: SufficientStats, p, alpha: float) -> np.ndarray:
    """Hessian of l_alpha in theta: -N G plus a finite-difference prior part."""
    p = as_point(p)
    alpha = _check_alpha(alpha)
    # no ill-conditioning warning here: the solver may wander far out first
    H = -s.n * _fisher_from(_polygammas(p)).matrix
    if alpha != 1.0:
        H = H + 0.5 * (1.0 - alpha) * _log_det_hessian(p)
    return H


# solver -------------------------------------------------------------------


def _theta_from_uv(w) -> ThetaPoint:
    eu, ev = math.exp(w[0]), math.exp(w[1])
    return ThetaPoint(0.5 * (eu + ev), 0.5 * (ev - eu))


def _uv_from_theta(p: ThetaPoint) -> np.ndarray:
    return np.array([math.log(2.0 * p.beta_minus), math.log(2.0 * p.beta_plus)])


def _uv_derivatives(s, w, alpha):
    p = _theta_from_uv(w)
    eu, ev = math.exp(w[0]), math.exp(w[1])
    J = np.array([[0.5 * eu, 0.5 * ev], [-0.5 * eu, 0.5 * ev]])  # d theta / d(u, v)
    g = posterior_gradient(s, p, alpha)
    H = J.T @ posterior_hessian(s, p, alpha) @ J
    H[0, 0] += 0.5 * eu * (g[0] - g[1])
    H[1, 1] += 0.5 * ev * (g[0] + g[1])
    return p, g, J.T @ g, H


def method_of_moments_start(s: SufficientStats, grid_points: int = 60) -> ThetaPoint:
    """Coarse-grid solve of E[X] = mean(x), E[ln sech X] = mean(ln sech x).

    Residuals are normalized by the Fisher metric (their natural scale), so
    the pick is the grid point with the smallest G^-1-weighted mismatch.
    Falls back to (2, 0) if nothing on the grid is finite.
    """
    shapes = np.geomspace(0.05, 50.0, grid_points)
    bp, bm = np.meshgrid(shapes, shapes, indexing="ij")
    t1 = bp + bm
    dp, dm, d1 = specfun.digamma(bp), specfun.digamma(bm), specfun.digamma(t1)
    # grad phi = E[(ln sech X, X)]
    e_lsech = 0.5 * (dp + dm) - d1 + LN2
    e_x = 0.5 * (dp - dm)
    r1 = e_lsech - s.log_a / s.n
    r2 = e_x - s.b / s.n
    a, b, c = specfun.polygamma(1, bp), specfun.polygamma(1, bm), specfun.polygamma(1, t1)
    D = a * b - c * (a + b)
    # r^T G^-1 r with G^-1 = (1/D) [[a+b, b-a], [b-a, a+b-4c]]
    cost = ((a + b) * r1 * r1 + 2.0 * (b - a) * r1 * r2 + (a + b - 4.0 * c) * r2 * r2) / D
    cost = np.where(np.isfinite(cost), cost, np.inf)
    i = np.unravel_index(np.argmin(cost), cost.shape)
    if not np.isfinite(cost[i]):
        return ThetaPoint(2.0, 0.0)
    return ThetaPoint(float(t1[i]), float(bp[i] - bm[i]))


def map_estimate(s: SufficientStats, alpha: float, cfg: SolverConfig = SolverConfig()) -> MapEstimate:
    """Maximize l_alpha by damped Newton in (u, v) with Armijo backtracking.

    When the (u, v) Hessian is not negative definite the step falls back to
    gradient ascent under the same line search.  Non-convergence is reported
    through ``converged=False`` rather than raised.
    """
    alpha = _check_alpha(alpha)
    if is_degenerate(s):
        warnings.warn("observations look degenerate (all equal); the MAP estimate may not exist", UserWarning, stacklevel=2)
    start = cfg.init if cfg.init is not None else method_of_moments_start(s)
    w = _uv_from_theta(start)
    p, g_theta, g, H = _uv_derivatives(s, w, alpha)
    f = log_posterior_unnorm(s, p, alpha)
    grad_norm = float(np.linalg.norm(g_theta))
    it = 0
    while grad_norm > cfg.grad_tol and it < cfg.max_iter:
        it += 1
        try:
            newton = -np.linalg.solve(H, g)
            ok = bool(np.all(np.linalg.eigvalsh(H) < 0))
        except np.linalg.LinAlgError:
            ok = False
        d = newton if ok else g / max(1.0, float(np.linalg.norm(g)))
        big = float(np.max(np.abs(d)))
        if big > _MAX_UV_STEP:
            d = d * (_MAX_UV_STEP / big)
        slope = float(g @ d)
        t = 1.0
        accepted = False
        while t > 1e-14:
            w_new = w + t * d
            try:
                p_new = _theta_from_uv(w_new)
                f_new = log_posterior_unnorm(s, p_new, alpha)
            except (DomainError, OverflowError):
                f_new = -math.inf
            if math.isfinite(f_new) and f_new >= f + _ARMIJO_C * t * slope:
                accepted = True
                break
            # below the resolution of l itself, accept a non-decreasing step
            # that shrinks the gradient (final Newton polishing)
            if t * abs(slope) < 1e3 * np.finfo(float).eps * max(1.0, abs(f)) and math.isfinite(f_new) and f_new >= f:
                if np.linalg.norm(posterior_gradient(s, p_new, alpha)) < grad_norm:
                    accepted = True
                    break
            t *= cfg.backtrack_ratio
        if not accepted:
            break
        w = w_new
        p, g_theta, g, H = _uv_derivatives(s, w, alpha)
        f = f_new
        grad_norm = float(np.linalg.norm(g_theta))
    return MapEstimate(p, alpha, grad_norm <= cfg.grad_tol, it, grad_norm, f)


def is_degenerate(s: SufficientStats) -> bool:
    """True when the statistics are those of n equal observations.

    ln sech is strictly concave, so mean(ln sech x) <= ln sech(mean x) with
    equality exactly when all x_i coincide.
    """
    gap = log_sech(s.b / s.n) - s.log_a / s.n
    return s.n == 1 or gap <= 1e-12 * max(1.0, abs(s.log_a / s.n))


def mle(s: SufficientStats, cfg: SolverConfig = SolverConfig()) -> MapEstimate:
    """Maximum likelihood: the alpha = 1 case."""
    return map_estimate(s, 1.0, cfg)
