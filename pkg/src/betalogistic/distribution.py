"""The beta-logistic family p(x; t1, t2) proportional to sech(x)^t1 exp(t2 x).

Natural coordinates (theta1, theta2) with theta1 +/- theta2 > 0.  The
normalizer is 2^(theta1-1) B((theta1-theta2)/2, (theta1+theta2)/2), so
the potential is

    phi = ln B((theta1-theta2)/2, (theta1+theta2)/2) + (theta1 - 1) ln 2.

Also here: an exact sampler (half the logit of a Beta variate), moments
by quadrature, and the Bernoulli / Euler polynomials realised as complex
moments of the (2, 0) and (1, 0) members.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import specfun
from .errors import DomainError
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate_line, tanh_sinh, truncation_window

LN2 = math.log(2.0)
SAMPLE_BLOCK = 1 << 16
MAX_POLY_DEGREE = 20


@dataclass(frozen=True)
class ThetaPoint:
    theta1: float
    theta2: float

    def __post_init__(self):
        t1, t2 = float(self.theta1), float(self.theta2)
        if not (math.isfinite(t1) and math.isfinite(t2)):
            raise DomainError(f"theta must be finite, got ({self.theta1}, {self.theta2})")
        if not (t1 + t2 > 0 and t1 - t2 > 0):
            raise DomainError(f"theta1 +/- theta2 must be > 0, got ({t1}, {t2})")
        object.__setattr__(self, "theta1", t1)
        object.__setattr__(self, "theta2", t2)

    @property
    def beta_plus(self) -> float:
        """(theta1 + theta2) / 2, the exponent attached to e^x."""
        return 0.5 * (self.theta1 + self.theta2)

    @property
    def beta_minus(self) -> float:
        return 0.5 * (self.theta1 - self.theta2)

    def mirrored(self) -> "ThetaPoint":
        return ThetaPoint(self.theta1, -self.theta2)

    def as_array(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2])


def as_point(p) -> ThetaPoint:
    if isinstance(p, ThetaPoint):
        return p
    t1, t2 = p
    return ThetaPoint(t1, t2)


@dataclass(frozen=True)
class MomentResult:
    value_real: float
    value_imag: float
    est_error: float

    def __post_init__(self):
        if not self.est_error >= 0:
            raise ValueError("est_error must be >= 0")


def log_sech(x):
    """ln sech(x) = ln 2 - |x| - ln(1 + e^(-2|x|)); finite for any real x."""
    ax = np.abs(np.asarray(x, dtype=float))
    out = LN2 - ax - np.log1p(np.exp(-2.0 * ax))
    return float(out) if np.ndim(x) == 0 else out


def potential(p) -> float:
    p = as_point(p)
    return specfun.log_beta(p.beta_minus, p.beta_plus) + LN2 * (p.theta1 - 1.0)


def potential_gamma_form(p) -> float:
    """The potential written with three log-gammas instead of a log-beta."""
    p = as_point(p)
    lg = specfun.log_gamma
    return lg(p.beta_minus) + lg(p.beta_plus) - lg(p.theta1) + LN2 * (p.theta1 - 1.0)


def log_pdf(p, x):
    p = as_point(p)
    x = np.asarray(x, dtype=float)
    out = p.theta1 * log_sech(x) + p.theta2 * x - potential(p)
    return float(out) if out.ndim == 0 else out


def pdf(p, x):
    out = np.exp(log_pdf(p, x))
    return float(out) if np.ndim(out) == 0 else out


def _log_gamma_variates(rng: np.random.Generator, shape: float, n: int) -> np.ndarray:
    if shape >= 1.0:
        return np.log(rng.standard_gamma(shape, n))
    # G_a = G_{a+1} U^(1/a); logs avoid underflow for small shapes
    return np.log(rng.standard_gamma(shape + 1.0, n)) + np.log(rng.random(n)) / shape


def sample(p, n: int, seed: int) -> np.ndarray:
    """n i.i.d. draws as X = (ln G+ - ln G-) / 2 with G+- ~ Gamma((theta1 +- theta2)/2).

    That is half the logit of V = G+ / (G+ + G-) ~ Beta(beta_plus, beta_minus).
    Draws come in blocks of ``SAMPLE_BLOCK``, each from its own Philox
    stream spawned off ``seed``, so output depends only on (p, n, seed).
    """
    p = as_point(p)
    if int(n) != n or n < 1:
        raise DomainError(f"sample count must be a positive integer, got {n!r}")
    n = int(n)
    nblocks = -(-n // SAMPLE_BLOCK)
    children = np.random.SeedSequence(seed).spawn(nblocks)
    out = np.empty(n)
    for i, child in enumerate(children):
        rng = np.random.Generator(np.random.Philox(child))
        lo = i * SAMPLE_BLOCK
        m = min(SAMPLE_BLOCK, n - lo)
        out[lo : lo + m] = 0.5 * (_log_gamma_variates(rng, p.beta_plus, m) - _log_gamma_variates(rng, p.beta_minus, m))
    return out


def expectation(p, g, log_abs_g=None, q: QuadratureSpec = DEFAULT_QUAD):
    """E[g(X)] by quadrature; returns the ``QuadResult``."""
    p = as_point(p)
    f = lambda x: g(x) * pdf(p, x)
    if log_abs_g is None:
        log_abs = None
    else:
        log_abs = lambda x: log_abs_g(x) + log_pdf(p, x)
    return integrate_line(f, log_abs, q)


def moment_result(p, k: int, q: QuadratureSpec = DEFAULT_QUAD) -> MomentResult:
    if int(k) != k or k < 0:
        raise DomainError(f"moment order must be a nonnegative integer, got {k!r}")
    k = int(k)
    res = expectation(p, lambda x: x**k, lambda x: k * np.log(np.abs(x)) if k else np.zeros_like(x), q)
    return MomentResult(res.value, 0.0, res.est_error)


def moment(p, k: int, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """E[X^k] by quadrature."""
    return moment_result(p, k, q).value_real


def cdf_by_quadrature(p, xs) -> np.ndarray:
    """CDF at each point of ``xs`` by integrating the density.

    The first (smallest) point is integrated from the left truncation edge,
    the rest by accumulating 10-point Gauss-Legendre panels between
    consecutive sorted points.
    """
    p = as_point(p)
    xs = np.asarray(xs, dtype=float)
    order = np.argsort(xs)
    sx = xs[order]
    lo, hi, peak = truncation_window(lambda x: log_pdf(p, x))
    f = lambda x: pdf(p, x)
    first = 0.0 if sx[0] <= lo else tanh_sinh(f, lo, sx[0], QuadratureSpec(abs_tol=1e-15, rel_tol=1e-12)).value
    gx, gw = np.polynomial.legendre.leggauss(10)
    a, b = sx[:-1], sx[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    panels = (f(mid[:, None] + half[:, None] * gx[None, :]) * gw[None, :]).sum(axis=1) * half
    cum = np.concatenate([[first], first + np.cumsum(panels)])
    out = np.empty_like(cum)
    out[order] = np.clip(cum, 0.0, 1.0)
    return out


# exact rational oracles ---------------------------------------------------


def bernoulli_numbers(n: int) -> list[Fraction]:
    """B_0..B_n from sum_{k=0}^{m} C(m+1, k) B_k = 0 (B_1 = -1/2)."""
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(math.comb(m + 1, k) * b[k] for k in range(m)) / (m + 1))
    return b


def bernoulli_polynomial(n: int, x) -> Fraction:
    """B_n(x) = sum_k C(n, k) B_k x^(n-k), exact for the binary value of x."""
    x = Fraction(x)
    b = bernoulli_numbers(n)
    return sum(math.comb(n, k) * b[k] * x ** (n - k) for k in range(n + 1))


def euler_polynomial(n: int, x) -> Fraction:
    """E_n(x) from E_m(x) + E_m(x+1) = 2 x^m with E_m(x+1) = sum_k C(m, k) E_k(x)."""
    x = Fraction(x)
    e: list[Fraction] = []
    for m in range(n + 1):
        e.append(x**m - sum(math.comb(m, k) * e[k] for k in range(m)) / 2)
    return e[n]


# polynomials as complex moments --------------------------------------------


def _complex_moment(n: int, x: float, log_weight, weight, q: QuadratureSpec) -> MomentResult:
    if int(n) != n or not 0 <= n <= MAX_POLY_DEGREE:
        raise DomainError(f"degree must be an integer in [0, {MAX_POLY_DEGREE}], got {n!r}")
    n = int(n)
    c = float(x) - 0.5
    log_abs = lambda t: 0.5 * n * np.log(c * c + t * t) + log_weight(t)
    lo, hi, peak = truncation_window(log_abs)
    z = lambda t: (c + 1j * t) ** n * weight(t)
    re = tanh_sinh(lambda t: z(t).real, lo, hi, q, center=peak)
    im = tanh_sinh(lambda t: z(t).imag, lo, hi, q, center=peak)
    return MomentResult(re.value, im.value, re.est_error + im.est_error)


def bernoulli_poly_via_moments(n: int, x: float, q: QuadratureSpec = DEFAULT_QUAD) -> MomentResult:
    """(pi/2) * integral of (x + i t - 1/2)^n sech^2(pi t) dt, which equals B_n(x)."""
    return _complex_moment(
        n,
        x,
        lambda t: math.log(0.5 * math.pi) + 2.0 * log_sech(math.pi * t),
        lambda t: 0.5 * math.pi * np.exp(2.0 * log_sech(math.pi * t)),
        q,
    )


def euler_poly_via_moments(n: int, x: float, q: QuadratureSpec = DEFAULT_QUAD) -> MomentResult:
    """Integral of (x + i t - 1/2)^n sech(pi t) dt, which equals E_n(x)."""
    return _complex_moment(
        n,
        x,
        lambda t: log_sech(math.pi * t),
        lambda t: np.exp(log_sech(math.pi * t)),
        q,
    )
