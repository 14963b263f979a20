"""Dual geometry of the beta-logistic manifold at a point.

Everything derives from the potential phi, whose Hessian is the Fisher
metric and whose third derivatives are the cubic tensor T.  Writing

    a = psi'((t1+t2)/2),  b = psi'((t1-t2)/2),  c = psi'(t1)

and a2, b2, c2 for the matching psi'' values, the Fisher matrix is

    g11 = (a + b)/4 - c,   g12 = (a - b)/4,   g22 = (a + b)/4

with det G = D / 4 where D = a b - c (a + b).  Curvature is computed twice:
from the closed forms (``curvature``) and from the generic T-contraction
(``curvature_tensor``); the two are cross-checked in the tests.

Sign convention: R_ijkl = (1 - alpha^2)/4 g^mn (T_kmi T_jln - T_kmj T_iln),
so R_1212 > 0 here while the intrinsic Gaussian curvature of the Fisher
metric is negative.  ``gaussian`` is R_1212 / det G in this convention,
i.e. minus the curvature a Brioschi-type computation would give.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import specfun
from .distribution import ThetaPoint, as_point

ILL_CONDITIONED_DET = 1e-12


@dataclass(frozen=True)
class _Polygammas:
    a: float  # psi'((t1+t2)/2)
    b: float  # psi'((t1-t2)/2)
    c: float  # psi'(t1)
    a2: float
    b2: float
    c2: float

    @property
    def D(self) -> float:
        return self.a * self.b - self.c * (self.a + self.b)


def _polygammas(p: ThetaPoint) -> _Polygammas:
    tri = specfun.polygamma(1, np.array([p.beta_plus, p.beta_minus, p.theta1]))
    tet = specfun.polygamma(2, np.array([p.beta_plus, p.beta_minus, p.theta1]))
    return _Polygammas(*map(float, tri), *map(float, tet))


def scaled_det(p) -> float:
    """D = psi'(b-) psi'(b+) - psi'(t1) (psi'(b-) + psi'(b+)), i.e. 4 det G."""
    return _polygammas(as_point(p)).D


@dataclass(frozen=True)
class FisherMatrix:
    g11: float
    g12: float
    g22: float
    det: float
    inv11: float
    inv12: float
    inv22: float
    cond: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g12, self.g22]])

    @property
    def inverse(self) -> np.ndarray:
        return np.array([[self.inv11, self.inv12], [self.inv12, self.inv22]])

    @property
    def ill_conditioned(self) -> bool:
        return self.det < ILL_CONDITIONED_DET


def _fisher_from(s: _Polygammas) -> FisherMatrix:
    D = s.D
    g11 = 0.25 * (s.a + s.b) - s.c
    g12 = 0.25 * (s.a - s.b)
    g22 = 0.25 * (s.a + s.b)
    inv11 = (s.a + s.b) / D
    inv12 = (s.b - s.a) / D
    inv22 = (s.a + s.b - 4.0 * s.c) / D
    eig = np.linalg.eigvalsh(np.array([[g11, g12], [g12, g22]]))
    cond = float(eig[-1] / eig[0]) if eig[0] > 0 else float("inf")
    return FisherMatrix(g11, g12, g22, 0.25 * D, inv11, inv12, inv22, cond)


def fisher(p) -> FisherMatrix:
    """Fisher information matrix, its determinant and inverse.

    Warns (``RuntimeWarning``) when det G drops below 1e-12; near the edge
    theta1 -/+ theta2 -> 0 the trigamma terms blow up and the entries lose
    digits to cancellation.
    """
    p = as_point(p)
    fm = _fisher_from(_polygammas(p))
    if fm.ill_conditioned:
        warnings.warn(f"det G = {fm.det:.3g} at {p}: Fisher matrix is ill-conditioned", RuntimeWarning, stacklevel=2)
    return fm


def _sym3(t111, t112, t122, t222) -> np.ndarray:
    out = np.empty((2, 2, 2))
    out[0, 0, 0] = t111
    out[0, 0, 1] = out[0, 1, 0] = out[1, 0, 0] = t112
    out[0, 1, 1] = out[1, 0, 1] = out[1, 1, 0] = t122
    out[1, 1, 1] = t222
    return out


@dataclass(frozen=True)
class TTensor:
    T111: float
    T112: float
    T122: float
    T222: float

    @property
    def array(self) -> np.ndarray:
        return _sym3(self.T111, self.T112, self.T122, self.T222)


def _t_from(s: _Polygammas) -> TTensor:
    t112 = 0.125 * (s.a2 - s.b2)
    return TTensor(
        T111=0.125 * (s.a2 + s.b2) - s.c2,
        T112=t112,
        T122=0.125 * (s.a2 + s.b2),
        T222=t112,
    )


def t_tensor(p) -> TTensor:
    """Cubic tensor T_ijk = third partials of the potential."""
    return _t_from(_polygammas(as_point(p)))


@dataclass(frozen=True)
class ConnectionField:
    """alpha-connection at a point.

    ``lower[i, j, k]`` is Gamma_ijk; ``raised[i, j, k]`` is Gamma^k_ij.
    """

    alpha: float
    lower: np.ndarray
    raised: np.ndarray


def _raised_levi_civita(s: _Polygammas) -> np.ndarray:
    """Gamma^k_ij at alpha = 0, simplified so the large psi''((t1-t2)/2)
    terms cancel symbolically instead of in floating point."""
    a, b, c, a2, b2, c2, D = s.a, s.b, s.c, s.a2, s.b2, s.c2, s.D
    odd = a2 * b - b2 * a
    even = a2 * b + b2 * a
    out = np.empty((2, 2, 2))
    out[0, 0, 0] = (even - 4.0 * c2 * (a + b)) / (8.0 * D)
    out[0, 1, 0] = out[1, 0, 0] = odd / (8.0 * D)
    out[1, 1, 0] = even / (8.0 * D)
    out[0, 0, 1] = odd / (8.0 * D) + c2 * (a - b) / (2.0 * D) + c * (b2 - a2) / (4.0 * D)
    out[0, 1, 1] = out[1, 0, 1] = (even - 2.0 * c * (a2 + b2)) / (8.0 * D)
    out[1, 1, 1] = (odd - 2.0 * c * (a2 - b2)) / (8.0 * D)
    return out


def connection(p, alpha: float) -> ConnectionField:
    p = as_point(p)
    s = _polygammas(p)
    k = (1.0 - alpha) / 16.0
    g111 = k * (s.a2 + s.b2 - 8.0 * s.c2)
    g112 = k * (s.a2 - s.b2)  # = Gamma_121 = Gamma_211 = Gamma_222
    g122 = k * (s.a2 + s.b2)
    lower = _sym3(g111, g112, g122, g112)
    # equal to lower contracted with G^-1; Gamma^(alpha) = (1 - alpha) Gamma^(0)
    raised = (1.0 - alpha) * _raised_levi_civita(s)
    return ConnectionField(float(alpha), lower, raised)


@dataclass(frozen=True)
class CurvatureReport:
    alpha: float
    R1212: float
    ricci11: float
    ricci12: float
    ricci22: float
    scalar: float
    gaussian: float

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "R1212": self.R1212,
            "ricci11": self.ricci11,
            "ricci12": self.ricci12,
            "ricci22": self.ricci22,
            "scalar": self.scalar,
            "gaussian": self.gaussian,
        }


def curvature(p, alpha: float) -> CurvatureReport:
    """alpha-curvatures from the closed-form expressions in the psi' / psi'' values."""
    p = as_point(p)
    s = _polygammas(p)
    D = s.D
    one_m = 1.0 - alpha * alpha
    # numerator shared by R1212, the Ricci components and the Gaussian curvature
    num = s.c * s.a2 * s.b2 - s.c2 * (s.a * s.b2 + s.b * s.a2)
    r1212 = one_m / (16.0 * D) * num
    # Ricci bracket a b2 c2 + (b c2 - c b2) a2, which equals -num
    bracket = s.a * s.c2 * s.b2 + (s.b * s.c2 - s.c * s.b2) * s.a2
    r11 = -one_m * (-4.0 * s.c + s.b + s.a) / (16.0 * D * D) * bracket
    r12 = one_m * (s.b - s.a) / (16.0 * D * D) * bracket
    r22 = -one_m * (s.b + s.a) / (16.0 * D * D) * bracket
    scalar = 8.0 * r1212 / D
    gaussian = r1212 / (0.25 * D)
    return CurvatureReport(float(alpha), r1212, r11, r12, r22, scalar, gaussian)


def _exact_contraction(s: _Polygammas, alpha: float):
    a, b, c, a2, b2, c2 = (Fraction(v) for v in (s.a, s.b, s.c, s.a2, s.b2, s.c2))
    D = a * b - c * (a + b)
    g = [[(a + b) / 4 - c, (a - b) / 4], [(a - b) / 4, (a + b) / 4]]
    inv = [[(a + b) / D, (b - a) / D], [(b - a) / D, (a + b - 4 * c) / D]]
    t112 = (a2 - b2) / 8
    t = {3: (a2 + b2) / 8 - c2, 2: t112, 1: (a2 + b2) / 8, 0: t112}
    T = lambda i, j, k: t[(i == 0) + (j == 0) + (k == 0)]
    scale = (1 - Fraction(alpha) ** 2) / 4
    idx = (0, 1)
    R = {}
    for i, j, k, l in itertools.product(idx, repeat=4):
        R[i, j, k, l] = scale * sum(
            inv[m][n] * (T(k, m, i) * T(j, l, n) - T(k, m, j) * T(i, l, n)) for m in idx for n in idx
        )
    return g, inv, R


def curvature_tensor(p, alpha: float) -> np.ndarray:
    """R_ijkl = (1 - alpha^2)/4 g^mn (T_kmi T_jln - T_kmj T_iln) as a (2,2,2,2) array.

    The contraction is carried out in exact rational arithmetic on the six
    polygamma values; in floating point it cancels badly near the edge of
    the domain (terms grow like psi''((t1-t2)/2)^2).
    """
    _, _, R = _exact_contraction(_polygammas(as_point(p)), alpha)
    out = np.empty((2, 2, 2, 2))
    for key, v in R.items():
        out[key] = float(v)
    return out


def curvature_by_contraction(p, alpha: float) -> CurvatureReport:
    """Same report as ``curvature`` but built from the contracted tensor."""
    g, inv, R = _exact_contraction(_polygammas(as_point(p)), alpha)
    idx = (0, 1)
    ricci = [[sum(R[i, j, k, l] * inv[j][l] for j in idx for l in idx) for k in idx] for i in idx]
    scalar = sum(ricci[i][k] * inv[i][k] for i in idx for k in idx)
    det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    r1212 = R[0, 1, 0, 1]
    return CurvatureReport(
        float(alpha),
        float(r1212),
        float(ricci[0][0]),
        float(ricci[0][1]),
        float(ricci[1][1]),
        float(scalar),
        float(r1212 / det),
    )


def gaussian_curvature_riemannian(p) -> float:
    """Gaussian curvature of the Fisher metric (alpha = 0), direct closed form."""
    s = _polygammas(as_point(p))
    den = 4.0 * (s.c * s.b + (s.c - s.b) * s.a) ** 2
    return (s.a2 * (s.b2 * s.c - s.c2 * s.b)) / den - (s.c2 * s.b2 * s.a) / den


# moment-based cross-checks --------------------------------------------------


def _centred_statistic_moments(p: ThetaPoint, orders):
    from .distribution import expectation, log_sech

    mu1 = expectation(p, lambda x: log_sech(x)).value
    mu2 = expectation(p, lambda x: x).value
    dev = (lambda x: log_sech(x) - mu1, lambda x: x - mu2)
    out = {}
    for idx in orders:
        f = lambda x, idx=idx: np.prod([dev[i](x) for i in idx], axis=0)
        out[idx] = expectation(p, f).value
    return out


def fisher_by_quadrature(p) -> np.ndarray:
    """Covariance of the sufficient statistic (ln sech X, X), by quadrature."""
    m = _centred_statistic_moments(as_point(p), [(0, 0), (0, 1), (1, 1)])
    return np.array([[m[0, 0], m[0, 1]], [m[0, 1], m[1, 1]]])


def t_tensor_by_quadrature(p) -> np.ndarray:
    """Third central moments of (ln sech X, X), which equal T_ijk."""
    m = _centred_statistic_moments(as_point(p), [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)])
    return _sym3(m[0, 0, 0], m[0, 0, 1], m[0, 1, 1], m[1, 1, 1])
