"""Dormand-Prince 5(4) integrator with PI step control and a domain guard.

Written for the geodesic flow, where leaving the open parameter domain
makes the right-hand side meaningless: a step whose stages leave the
domain is rejected and the step halved, and if halving reaches
``boundary_resolution`` the integration stops with ``DOMAIN_BOUNDARY``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

# Butcher tableau (Dormand & Prince 1980)
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
# difference between the 5th and embedded 4th order weights
E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 10.0
PI_BETA = 0.04
PI_EXPO = 0.2 - 0.75 * PI_BETA
MIN_STEP = 1e-14


class Termination(str, Enum):
    TIME_REACHED = "time_reached"
    DOMAIN_BOUNDARY = "domain_boundary"
    STEP_UNDERFLOW = "step_underflow"


@dataclass
class Solution:
    t: np.ndarray
    y: np.ndarray
    termination: Termination
    n_accepted: int = 0
    n_rejected: int = 0
    n_domain_rejected: int = 0
    n_rhs: int = 0
    message: str = ""


@dataclass
class _Trial:
    y_new: np.ndarray | None = None
    k_last: np.ndarray | None = None
    err: np.ndarray | float = math.inf  # local error vector
    in_domain: bool = True


def _step(f, t, y, k1, h, in_domain) -> tuple[_Trial, int]:
    k = [k1]
    nfev = 0
    for s in range(1, 7):
        with np.errstate(over="ignore", invalid="ignore"):
            ys = y + h * sum(a * kk for a, kk in zip(A[s], k) if a != 0.0)
        if not in_domain(ys):
            return _Trial(in_domain=False), nfev
        ks = f(t + C[s] * h, ys)
        nfev += 1
        if not np.all(np.isfinite(ks)):
            return _Trial(err=math.inf), nfev
        k.append(ks)
    # stage 7 is evaluated at y_new (FSAL), so y_new == last stage input
    y_new = ys
    err_vec = h * sum(e * kk for e, kk in zip(E, k) if e != 0.0)
    return _Trial(y_new=y_new, k_last=k[-1], err=err_vec), nfev


def _initial_step(y0, f0, rel_tol, abs_tol):
    sc = abs_tol + np.abs(y0) * rel_tol
    d0 = np.sqrt(np.mean((y0 / sc) ** 2))
    d1 = np.sqrt(np.mean((f0 / sc) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h0, 0.1)


def integrate(
    f: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0: Sequence[float],
    t_end: float,
    rel_tol: float = 1e-9,
    abs_tol: float = 1e-12,
    in_domain: Callable[[np.ndarray], bool] = lambda y: True,
    t_stops: Sequence[float] | None = None,
    boundary_resolution: float = 1e-10,
    max_steps: int = 1_000_000,
) -> Solution:
    """Integrate y' = f(t, y) from t0 to t_end (t_end > t0).

    Every time in ``t_stops`` is hit exactly by an accepted step.  Errors
    are measured in the RMS norm with weights abs_tol + rel_tol |y|.
    """
    if not t_end > t0:
        raise ValueError("t_end must exceed t0")
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValueError("tolerances must be > 0")
    y = np.asarray(y0, dtype=float).copy()
    if not in_domain(y):
        raise ValueError("initial state outside the domain")
    stops = sorted(float(s) for s in (() if t_stops is None else t_stops) if t0 < s < t_end) + [float(t_end)]
    stop_i = 0

    t = float(t0)
    k1 = f(t, y)
    sol = Solution(t=None, y=None, termination=Termination.TIME_REACHED, n_rhs=1)
    ts, ys = [t], [y.copy()]
    h = _initial_step(y, k1, rel_tol, abs_tol)
    err_old = 1e-4

    for _ in range(max_steps):
        target = stops[stop_i]
        h_try = min(h, target - t)
        landing = h_try == target - t
        trial, nfev = _step(f, t, y, k1, h_try, in_domain)
        sol.n_rhs += nfev

        if not trial.in_domain:
            sol.n_domain_rejected += 1
            if h_try <= boundary_resolution:
                sol.termination = Termination.DOMAIN_BOUNDARY
                sol.message = f"boundary localized near t={t:.12g}"
                break
            h = 0.5 * h_try
            continue

        if np.all(np.isfinite(trial.err)):
            sc = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(trial.y_new))
            # fsum is correctly rounded, so the norm ignores component order
            err = math.sqrt(math.fsum((trial.err / sc) ** 2) / len(sc))
        else:
            err = math.inf

        if err <= 1.0:
            t = target if landing else t + h_try
            y = trial.y_new
            k1 = trial.k_last
            ts.append(t)
            ys.append(y.copy())
            sol.n_accepted += 1
            fac = (max(err, 1e-10) ** PI_EXPO) / err_old**PI_BETA / SAFETY
            fac = min(1.0 / FAC_MIN, max(1.0 / FAC_MAX, fac))
            h_new = h_try / fac
            err_old = max(err, 1e-4)
            if landing:
                stop_i += 1
                if stop_i == len(stops):
                    break
                # do not let a short landing step throttle the next one
                h_new = max(h_new, h)
            h = h_new
        else:
            sol.n_rejected += 1
            fac = min(1.0 / FAC_MIN, (err ** (1 / 5) if math.isfinite(err) else 1 / FAC_MIN) / SAFETY)
            h = h_try / fac
            if h < MIN_STEP:
                sol.termination = Termination.STEP_UNDERFLOW
                sol.message = f"step size fell below {MIN_STEP} at t={t:.12g}"
                break
    else:
        sol.termination = Termination.STEP_UNDERFLOW
        sol.message = "max_steps exhausted"

    sol.t = np.array(ts)
    sol.y = np.array(ys)
    return sol
