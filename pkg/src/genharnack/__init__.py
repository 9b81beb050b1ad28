"""Numerical verification tools for Harnack-type estimates of fully nonlinear
elliptic inequalities with a superlinear gradient drift ``phi(|Du|)``."""

from .drift import DriftFunction, eval_phi, from_config as drift_from_config
from .errors import ConfigError, DomainError, InfeasibleError, QuadratureError, TruncatedDomainError
from .grid import GridFunction
from .pucci import EllipticityPair, pucci_minus, pucci_plus

__all__ = [
    "ConfigError",
    "DomainError",
    "DriftFunction",
    "EllipticityPair",
    "GridFunction",
    "InfeasibleError",
    "QuadratureError",
    "TruncatedDomainError",
    "drift_from_config",
    "eval_phi",
    "pucci_minus",
    "pucci_plus",
]

__version__ = "0.1.0"
