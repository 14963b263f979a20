"""Real-argument special functions: log-gamma, polygamma, Hurwitz zeta.

Every function accepts a scalar or an array and evaluates elementwise;
scalars in give Python floats out.  Arguments must be strictly positive,
the manifold domain never needs the analytic continuation.

Small arguments are pushed upward with the functional recurrences until
they reach ``SHIFT_THRESHOLD`` and the asymptotic (Stirling / Bernoulli)
series takes over.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

import numpy as np

from .errors import DomainError

SHIFT_THRESHOLD = 10.0
MAX_POLYGAMMA_ORDER = 3

# B_2, B_4, ..., B_20
_BERNOULLI_EVEN = [
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
]
B2K = np.array([float(b) for b in _BERNOULLI_EVEN])

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _as_positive(z, name="z"):
    arr = np.asarray(z, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"{name} must be > 0, got {z!r}")
    return arr


def _out(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


def _shift_counts(z):
    return np.maximum(0, np.ceil(SHIFT_THRESHOLD - z)).astype(int)


EULER_GAMMA = 0.57721566490153286060651209008240243
# positive zero of the digamma function, split into a double and its residual
_PSI_ROOT = Fraction("1.4616321449683623412626595423257213284681962040064463512959884")
PSI_ROOT_HI = float(_PSI_ROOT)
PSI_ROOT_LO = float(_PSI_ROOT - Fraction(PSI_ROOT_HI))
_LOCAL_TERMS = 40
_PSI_ROOT_RADIUS = 0.25


@functools.lru_cache(maxsize=None)
def _local_coefficients():
    # zeta(k) - 1 = zeta(k, 2) for the log-gamma series about 1 and 2, and
    # psi^(k)(x0)/k! = (-1)^(k+1) zeta(k+1, x0) for the series about the psi root
    zm1 = np.array([hurwitz_zeta(k, 2.0) for k in range(2, _LOCAL_TERMS + 2)])
    root = np.array([(-1) ** (k + 1) * hurwitz_zeta(k + 1, PSI_ROOT_HI) for k in range(1, _LOCAL_TERMS + 1)])
    return zm1, root


def _lgamma_local(eps, around_two):
    """ln Gamma(1 + eps) (or ln Gamma(2 + eps)) for |eps| <= 1/2 from

    ln Gamma(2 + eps) = (1 - gamma) eps + sum_k (-1)^k (zeta(k) - 1) eps^k / k,

    which stays accurate in the relative sense through the zeros at 1 and 2.
    """
    zm1, _ = _local_coefficients()
    acc = np.zeros_like(eps)
    for j in range(len(zm1) - 1, -1, -1):
        k = j + 2
        acc = acc * eps + (-1) ** k * zm1[j] / k
    val = eps * ((1.0 - EULER_GAMMA) + acc * eps)
    return val if around_two else val - np.log1p(eps)


def _digamma_near_root(x):
    _, root = _local_coefficients()
    d = (x - PSI_ROOT_HI) - PSI_ROOT_LO
    acc = np.zeros_like(d)
    for c in root[::-1]:
        acc = acc * d + c
    return acc * d


def log_gamma(z):
    """Natural log of the gamma function for z > 0."""
    z = _as_positive(z)
    near_one = (z >= 0.5) & (z < 1.5)
    near_two = (z >= 1.5) & (z < 2.5)
    out = _log_gamma_stirling(z)
    if near_one.any():
        out = np.where(near_one, _lgamma_local(np.where(near_one, z - 1.0, 0.0), False), out)
    if near_two.any():
        out = np.where(near_two, _lgamma_local(np.where(near_two, z - 2.0, 0.0), True), out)
    return _out(out, z)


def _log_gamma_stirling(z):
    n = _shift_counts(z)
    prod = np.ones_like(z)
    for k in range(int(n.max(initial=0))):
        prod = np.where(k < n, prod * (z + k), prod)
    w = z + n
    inv = 1.0 / w
    inv2 = inv * inv
    # sum_k B_2k / (2k (2k-1) w^(2k-1)), Horner in 1/w^2 from the tail
    series = np.zeros_like(w)
    for k in range(len(B2K), 0, -1):
        series = series * inv2 + B2K[k - 1] / (2 * k * (2 * k - 1))
    series *= inv
    stirling = (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series
    return stirling - np.log(prod)


def _polygamma_asymptotic(m, w):
    inv = 1.0 / w
    inv2 = inv * inv
    if m == 0:
        tail = np.zeros_like(w)
        for k in range(len(B2K), 0, -1):
            tail = tail * inv2 + B2K[k - 1] / (2 * k)
        return np.log(w) - 0.5 * inv - tail * inv2
    # (-1)^(m+1) [ (m-1)!/w^m + m!/(2 w^(m+1)) + sum_k B_2k (2k+m-1)!/((2k)! w^(2k+m)) ]
    tail = np.zeros_like(w)
    for k in range(len(B2K), 0, -1):
        coef = math.factorial(2 * k + m - 1) / math.factorial(2 * k)
        tail = tail * inv2 + B2K[k - 1] * coef
    tail = tail * inv2
    body = math.factorial(m - 1) + math.factorial(m) * 0.5 * inv + tail
    return (-1) ** (m + 1) * body * inv**m


def polygamma(m: int, z):
    """Polygamma function psi^(m)(z) for 0 <= m <= 3 and z > 0.

    ``m = 0`` is the digamma function.
    """
    if int(m) != m or not 0 <= m <= MAX_POLYGAMMA_ORDER:
        raise DomainError(f"polygamma order must be an integer in [0, 3], got {m!r}")
    m = int(m)
    z = _as_positive(z)
    n = _shift_counts(z)
    # psi^(m)(z) = psi^(m)(z+1) - (-1)^m m! z^-(m+1)
    shift = np.zeros_like(z)
    for k in range(int(n.max(initial=0))):
        shift = np.where(k < n, shift + (z + k) ** (-(m + 1)), shift)
    val = _polygamma_asymptotic(m, z + n) - (-1) ** m * math.factorial(m) * shift
    if m == 0:
        near = np.abs(z - PSI_ROOT_HI) <= _PSI_ROOT_RADIUS
        if near.any():
            val = np.where(near, _digamma_near_root(np.where(near, z, PSI_ROOT_HI)), val)
    return _out(val, z)


def digamma(z):
    return polygamma(0, z)


def trigamma(z):
    return polygamma(1, z)


def hurwitz_zeta(s: float, a):
    """Hurwitz zeta function zeta(s, a) for s > 1 and a > 0.

    Euler-Maclaurin summation: the head sum runs until the shift reaches
    ``10 + s`` and the tail is closed with ten Bernoulli correction terms.
    """
    s = float(s)
    if not s > 1.0:
        raise DomainError(f"hurwitz_zeta needs s > 1, got s={s!r}")
    a = _as_positive(a, "a")
    target = SHIFT_THRESHOLD + s
    n = np.maximum(0, np.ceil(target - a)).astype(int)
    head = np.zeros_like(a)
    for k in range(int(n.max(initial=0))):
        head = np.where(k < n, head + (a + k) ** (-s), head)
    w = a + n
    tail = w ** (1.0 - s) / (s - 1.0) + 0.5 * w ** (-s)
    rising = s  # s (s+1) ... (s+2j-2)
    wpow = w ** (-s - 1.0)
    fact = 2.0  # (2j)!
    for j in range(1, len(B2K) + 1):
        tail = tail + B2K[j - 1] / fact * rising * wpow
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        wpow = wpow / (w * w)
        fact *= (2 * j + 1) * (2 * j + 2)
    return _out(head + tail, a)


def riemann_zeta(s: float) -> float:
    return hurwitz_zeta(s, 1.0)


def harmonic_number(n: int, r: int) -> float:
    """Generalized harmonic number H_n^(r) = sum_{k=1}^n k^-r."""
    if n < 0 or r < 1 or int(n) != n or int(r) != r:
        raise DomainError(f"harmonic_number needs integers n >= 0, r >= 1, got ({n}, {r})")
    return math.fsum(k ** (-float(r)) for k in range(1, int(n) + 1))


def log_beta(x, y):
    """ln B(x, y) through log-gamma; symmetric in its arguments bit for bit."""
    x = _as_positive(x, "x")
    y = _as_positive(y, "y")
    # sum the two single terms in a canonical order so log_beta(x, y) == log_beta(y, x)
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    val = np.asarray(log_gamma(lo)) + np.asarray(log_gamma(hi)) - np.asarray(log_gamma(x + y))
    return _out(val, np.broadcast_arrays(x, y)[0])
