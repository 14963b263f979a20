"""Geodesics of the Fisher metric and a simple geodesic-spread diagnostic.

The state is (theta1, theta2, dtheta1/dt, dtheta2/dt) and the flow is
theta'' = -Gamma^k_ij theta'^i theta'^j with the Levi-Civita (alpha = 0)
connection.  Integration is Dormand-Prince 5(4) with a domain guard; the
boundary theta1 +/- theta2 = 0 is at infinite metric distance, so hitting
it signals step overshoot rather than a genuine exit.

The integrator runs in the shape chart beta = ((t1+t2)/2, (t1-t2)/2), a
linear image of theta, so geodesics map over unchanged.  There the metric
is [[a-c, -c], [-c, b-c]] with a = psi'(beta+), b = psi'(beta-),
c = psi'(t1), and the Christoffel symbols stay well conditioned when one
shape parameter is tiny and the other huge; in theta coordinates the same
regime has velocity components agreeing to many digits and the error
control cannot see the direction that matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry, specfun
from .distribution import ThetaPoint, as_point
from .errors import DomainError
from .geometry import _polygammas
from .ode import Termination, integrate

DEFAULT_REL_TOL = 1e-9
DEFAULT_ABS_TOL = 1e-12
DEFAULT_T_END = 5.0
DEFAULT_DIRECTIONS = 16


@dataclass(frozen=True)
class GeodesicConfig:
    t_end: float = DEFAULT_T_END
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    directions: int = DEFAULT_DIRECTIONS


@dataclass(frozen=True)
class GeodesicState:
    t: float
    theta: ThetaPoint
    velocity: tuple[float, float]


@dataclass
class GeodesicPath:
    t: np.ndarray  # (n,)
    theta: np.ndarray  # (n, 2)
    velocity: np.ndarray  # (n, 2)
    termination: Termination
    shape_state: np.ndarray | None = None  # (n, 4) in the shape chart

    @property
    def states(self) -> list[GeodesicState]:
        return [
            GeodesicState(float(t), ThetaPoint(*th), (float(v[0]), float(v[1])))
            for t, th, v in zip(self.t, self.theta, self.velocity)
        ]

    def speeds(self) -> np.ndarray:
        """g(theta', theta') at every stored state."""
        if self.shape_state is not None:
            return np.array([_shape_speed(y[:2], y[2:]) for y in self.shape_state])
        return np.array([metric_speed(th, v) for th, v in zip(self.theta, self.velocity)])

    def at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        i = int(np.argmin(np.abs(self.t - t)))
        if not math.isclose(self.t[i], t, rel_tol=0, abs_tol=1e-12):
            raise KeyError(f"time {t} is not a stored step")
        return self.theta[i], self.velocity[i]


def in_domain(theta) -> bool:
    return bool(theta[0] + theta[1] > 0 and theta[0] - theta[1] > 0)


def _shape_polygammas(bp, bm):
    tri = specfun.polygamma(1, np.array([bp, bm, bp + bm]))
    tet = specfun.polygamma(2, np.array([bp, bm, bp + bm]))
    return (*map(float, tri), *map(float, tet))


def _to_shape(theta, velocity):
    th = np.asarray(theta, dtype=float)
    v = np.asarray(velocity, dtype=float)
    return (
        np.array([0.5 * (th[0] + th[1]), 0.5 * (th[0] - th[1])]),
        np.array([0.5 * (v[0] + v[1]), 0.5 * (v[0] - v[1])]),
    )


def _shape_speed(beta, w) -> float:
    a, b, c, *_ = _shape_polygammas(beta[0], beta[1])
    return float((a - c) * w[0] * w[0] - 2.0 * c * w[0] * w[1] + (b - c) * w[1] * w[1])


def metric_speed(theta, velocity) -> float:
    """g(v, v) at ``theta``, evaluated in the shape chart."""
    ThetaPoint(*theta)
    return _shape_speed(*_to_shape(theta, velocity))


def _shape_flow(t, y):
    """Geodesic flow for y = (beta+, beta-, dbeta+/dt, dbeta-/dt)."""
    a, b, c, a2, b2, c2 = _shape_polygammas(y[0], y[1])
    D = a * b - c * (a + b)
    w0, w1 = y[2], y[3]
    # Gamma^k_ij = T_ijs h^sk / 2 with T_+++ = a2-c2, T_--- = b2-c2, mixed = -c2
    g0_00 = 0.5 * ((a2 - c2) * (b - c) - c * c2) / D
    g0_01 = -0.5 * c2 * b / D
    g0_11 = 0.5 * (b2 * c - c2 * b) / D
    g1_00 = 0.5 * (a2 * c - c2 * a) / D
    g1_01 = -0.5 * c2 * a / D
    g1_11 = 0.5 * ((b2 - c2) * (a - c) - c * c2) / D
    # summation order chosen so swapping beta+ and beta- swaps the output exactly
    acc0 = -(g0_00 * w0 * w0 + g0_11 * w1 * w1 + 2.0 * g0_01 * (w0 * w1))
    acc1 = -(g1_11 * w1 * w1 + g1_00 * w0 * w0 + 2.0 * g1_01 * (w0 * w1))
    return np.array([w0, w1, acc0, acc1])


def geodesic_rhs(s: GeodesicState) -> np.ndarray:
    """Acceleration -Gamma^k_ij v^i v^j from the raised alpha=0 connection."""
    v = np.asarray(s.velocity, dtype=float)
    raised = geometry.connection(s.theta, 0.0).raised
    return -np.einsum("ijk,i,j->k", raised, v, v)


def geodesic_rhs_explicit(s: GeodesicState) -> np.ndarray:
    """The two geodesic equations written out in psi' / psi'' terms."""
    q = _polygammas(as_point(s.theta))
    a, b, c, a2, b2, c2, D = q.a, q.b, q.c, q.a2, q.b2, q.c2, q.D
    v1, v2 = s.velocity
    acc1 = (
        (a * (4 * c2 - b2) + b * (4 * c2 - a2)) / (8 * D) * v1 * v1
        - (a2 * b - b2 * a) / (4 * D) * v1 * v2
        - (b2 * a + a2 * b) / (8 * D) * v2 * v2
    )
    acc2 = -(
        (a * (4 * c2 - b2) / (8 * D) + (b2 - a2) * c / (4 * D) + (a2 - 4 * c2) * b / (8 * D)) * v1 * v1
        + (b2 * (a - 2 * c) + a2 * (b - 2 * c)) / (4 * D) * v1 * v2
        + (b2 * (2 * c - a) + a2 * (b - 2 * c)) / (8 * D) * v2 * v2
    )
    return np.array([acc1, acc2])


def integrate_geodesic(
    start: GeodesicState,
    t_end: float,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    t_eval=None,
) -> GeodesicPath:
    """Integrate the geodesic through ``start`` up to ``t_end``.

    ``t_eval`` times are landed on exactly, which lets two paths be compared
    at matched times.
    """
    if not t_end > start.t:
        raise DomainError(f"t_end must exceed the start time {start.t}")
    if not (rel_tol > 0 and abs_tol > 0):
        raise DomainError("tolerances must be > 0")
    th = as_point(start.theta)
    beta, w = _to_shape(th.as_array(), start.velocity)
    sol = integrate(
        _shape_flow,
        start.t,
        np.concatenate([beta, w]),
        t_end,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        in_domain=lambda y: bool(y[0] > 0 and y[1] > 0),
        t_stops=t_eval,
    )
    bp, bm, wp, wm = sol.y.T
    theta = np.column_stack([bp + bm, bp - bm])
    velocity = np.column_stack([wp + wm, wp - wm])
    return GeodesicPath(sol.t, theta, velocity, sol.termination, shape_state=sol.y)


def _frame_velocity(origin, u) -> np.ndarray:
    G = geometry.fisher(origin).matrix
    L = np.linalg.cholesky(G)
    return np.linalg.solve(L.T, np.asarray(u, dtype=float))


def unit_velocity(origin, angle: float) -> np.ndarray:
    """Unit Fisher-speed velocity at ``origin`` making ``angle`` in the
    orthonormal frame given by the Cholesky factor of G (angle 0 is +theta1)."""
    return _frame_velocity(origin, [math.cos(angle), math.sin(angle)])


def bundle_angles(count: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(count) / count


def _bundle_unit_vectors(count: int) -> list[tuple[float, float]]:
    # direction k and count-k get bitwise mirrored (cos, +-sin)
    out = []
    for k in range(count):
        m = count - k if 2 * k > count else k
        ang = 2.0 * math.pi * m / count
        sgn = -1.0 if 2 * k > count else 1.0
        out.append((math.cos(ang), sgn * math.sin(ang)))
    return out


def geodesic_bundle(
    origin,
    directions: int = DEFAULT_DIRECTIONS,
    t_end: float = DEFAULT_T_END,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    t_eval=None,
) -> list[GeodesicPath]:
    """Unit-speed geodesics from ``origin`` at ``directions`` equally spaced angles."""
    if int(directions) != directions or directions < 1:
        raise DomainError(f"directions must be a positive integer, got {directions!r}")
    origin = as_point(origin)
    paths = []
    for u in _bundle_unit_vectors(int(directions)):
        v = _frame_velocity(origin, u)
        start = GeodesicState(0.0, origin, (float(v[0]), float(v[1])))
        paths.append(integrate_geodesic(start, t_end, rel_tol, abs_tol, t_eval))
    return paths


@dataclass
class SpreadReport:
    """Separation between a fiducial geodesic and an angle-perturbed one.

    ``separations[0]`` is the initial positional offset (zero: both leave
    the same point); ``initial_rate`` is the Fisher norm of the initial
    velocity difference, i.e. the slope of the flat-space baseline.
    """

    times: np.ndarray
    separations: np.ndarray
    initial_rate: float
    terminations: tuple[Termination, Termination]


def spread_diagnostic(
    origin,
    base_direction: float,
    perturbation: float,
    t_end: float = DEFAULT_T_END,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    samples: int = 51,
) -> SpreadReport:
    """Metric separation of two nearby geodesics at matched times.

    The coordinate difference is normed with the Fisher metric at the
    fiducial point, a small-separation stand-in for the Jacobi field.
    """
    origin = as_point(origin)
    times = np.linspace(0.0, t_end, samples)
    v0 = unit_velocity(origin, base_direction)
    v1 = unit_velocity(origin, base_direction + perturbation)
    fid = integrate_geodesic(GeodesicState(0.0, origin, tuple(v0)), t_end, rel_tol, abs_tol, times[1:-1])
    per = integrate_geodesic(GeodesicState(0.0, origin, tuple(v1)), t_end, rel_tol, abs_tol, times[1:-1])
    seps, kept = [], []
    for t in times:
        try:
            a, _ = fid.at(t)
            b, _ = per.at(t)
        except KeyError:
            break
        d = b - a
        G = geometry.fisher(tuple(a)).matrix
        seps.append(math.sqrt(max(0.0, float(d @ G @ d))))
        kept.append(t)
    dv = v1 - v0
    rate = math.sqrt(float(dv @ geometry.fisher(origin).matrix @ dv))
    return SpreadReport(np.array(kept), np.array(seps), rate, (fid.termination, per.termination))
