"""Numerical study of the Bloch-norm function l(t) of weighted Bergman projections.

The function is computed four independent ways (full Monte Carlo integral over
the ball, a reduced two-variable deterministic quadrature, a double series and
a closed single series) and the resulting operator-norm constants are
cross-checked against each other.
"""

from .common import ConvergenceError, DomainError, Params, QuadResult, SeriesResult
from .norm_constants import NormConstants, bound_check, chain_consistency, compute_constants
from .series_repr import (
    l_double_series,
    l_limit_zero,
    l_series,
    phi_eval,
    scan_monotone,
)

__all__ = [
    "ConvergenceError",
    "DomainError",
    "NormConstants",
    "Params",
    "QuadResult",
    "SeriesResult",
    "bound_check",
    "chain_consistency",
    "compute_constants",
    "l_double_series",
    "l_limit_zero",
    "l_series",
    "phi_eval",
    "scan_monotone",
]

__version__ = "0.1.0"
