"""Information geometry of the beta-logistic family sech(x)^theta1 exp(theta2 x)."""

from .distribution import ThetaPoint
from .errors import ConvergenceError, DomainError

__all__ = ["ThetaPoint", "DomainError", "ConvergenceError"]
__version__ = "0.1.0"
