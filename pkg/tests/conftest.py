import math

import mpmath
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

mpmath.mp.dps = 40

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def rel_err(x, ref) -> float:
    ref = mpmath.mpf(ref)
    if ref == 0:
        return float(abs(mpmath.mpf(x)))
    return float(abs((mpmath.mpf(x) - ref) / ref))


def theta_grid():
    """The 25-point grid: theta1 in [0.5, 8], theta2 spread across (-theta1, theta1)."""
    return [(t1, t1 * r) for t1 in (0.5, 1.0, 2.0, 4.0, 8.0) for r in (-0.9, -0.45, 0.0, 0.45, 0.9)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def mp_phi(t1, t2):
    """Potential in high precision: ln B(beta-, beta+) + (t1 - 1) ln 2."""
    t1, t2 = mpmath.mpf(t1), mpmath.mpf(t2)
    bp, bm = (t1 + t2) / 2, (t1 - t2) / 2
    return mpmath.log(mpmath.beta(bm, bp)) + (t1 - 1) * mpmath.log(2)


__all__ = ["rel_err", "theta_grid", "mp_phi", "math"]
