"""Closed-form normalising constants and the Bloch norms of the projection."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .common import Params

LOG_PI = math.log(math.pi)
# Gamma(1/2) Gamma(3/2) = pi / 2, the leading coefficient a_0 of the series.
LOG_A0 = math.log(math.pi / 2)
UPPER_BOUND_FACTOR = math.sqrt(math.pi**2 + 4) / 2


@dataclass(frozen=True)
class NormConstants:
    n: int
    alpha: float
    c_alpha: float
    k_alpha: float
    C_alpha: float
    C_tilde: float
    bloch_norm: float
    bound_low: float
    bound_high: float
    log_c_alpha: float
    log_k_alpha: float
    log_C_alpha: float
    log_C_tilde: float

    def as_dict(self) -> dict[str, float]:
        return dict(self.__dict__)


def log_c_alpha(p: Params) -> float:
    """ln of the normaliser Gamma(n+a+1) / (Gamma(a+1) pi^n) of dv_alpha."""
    return math.lgamma(p.s + 1) - math.lgamma(p.alpha + 1) - p.n * LOG_PI


def log_k_alpha(p: Params) -> float:
    """ln of the inner-ball integral of (1 - |w|^2)^alpha over B^(n-2).

    For n = 2 the ball is zero-dimensional and the value is exactly 1.
    """
    if p.n == 2:
        return 0.0
    return (p.n - 2) * LOG_PI + math.lgamma(p.alpha + 1) - math.lgamma(p.s - 1)


def log_C_alpha(p: Params) -> float:
    """ln Gamma(n+a+2) - 2 ln Gamma((n+a)/2 + 1)."""
    return math.lgamma(p.s + 2) - 2 * math.lgamma(p.s / 2 + 1)


def log_chain_factor(p: Params) -> float:
    """ln[(n+a+1) c_alpha k_alpha pi^2], the factor turning I(cos t, sin t) into l(t)."""
    return math.log(p.s + 1) + log_c_alpha(p) + log_k_alpha(p) + 2 * LOG_PI


def _exp(x: float) -> float:
    # inf instead of OverflowError; the log fields stay exact
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def compute_constants(p: Params) -> NormConstants:
    lc, lk, lC = log_c_alpha(p), log_k_alpha(p), log_C_alpha(p)
    lCt = lC + LOG_A0
    C = _exp(lC)
    C_tilde = _exp(lCt)
    return NormConstants(
        n=p.n,
        alpha=p.alpha,
        c_alpha=_exp(lc),
        k_alpha=_exp(lk),
        C_alpha=C,
        C_tilde=C_tilde,
        bloch_norm=1.0 + C_tilde,
        bound_low=C_tilde,
        bound_high=UPPER_BOUND_FACTOR * C,
        log_c_alpha=lc,
        log_k_alpha=lk,
        log_C_alpha=lC,
        log_C_tilde=lCt,
    )


def chain_consistency(p: Params, phi_gamma_shift: int = -1) -> float:
    """Relative residual between the constant chain of the integral reduction and (pi/2) C_alpha.

    The chain is (n+a+1) c_alpha k_alpha pi^2 Gamma(n+a+shift) /
    Gamma((n+a)/2+1)^2 * Gamma(1/2) Gamma(3/2). ``phi_gamma_shift = -1`` is
    the prefactor of phi that makes the chain close; ``+1`` reproduces the
    alternative prefactor and yields a residual far from zero.
    """
    log_chain = (
        log_chain_factor(p)
        + math.lgamma(p.s + phi_gamma_shift)
        - 2 * math.lgamma(p.s / 2 + 1)
        + LOG_A0
    )
    return abs(math.expm1(log_chain - (log_C_alpha(p) + LOG_A0)))


def bound_check(p: Params, max_from_scan: float) -> bool:
    """True iff the observed maximum of l lies in the two-sided norm estimate.

    The admissible interval is [(pi/2) C_alpha, (sqrt(pi^2+4)/2) C_alpha]
    widened by 1e-9 C_alpha on both sides.
    """
    k = compute_constants(p)
    tol = 1e-9 * k.C_alpha
    return k.bound_low - tol <= max_from_scan <= k.bound_high + tol
