"""Gamma-family and Gauss hypergeometric primitives.

Anything built from several Gamma values is combined in log space so that
arguments in the hundreds or thousands never overflow.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy import special as sc

from .common import DomainError, SeriesResult

# Stirling-series coefficients B_{2j} / (2j (2j - 1)).
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)
# Above this argument the truncated Stirling tail is below 1e-21.
_STIRLING_MIN = 20.0
_EXACT_PRODUCT_MAX = 64


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


# Working precision for the scalar lnGamma. Rounding the 30-digit value to
# double keeps ln Gamma(x+1) - ln Gamma(x) within an ulp of the true value
# even where lnGamma is in the thousands, and near the zeros x = 1, 2.
_LOG_GAMMA_DPS = 30


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0, correctly rounded in practice."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    with mpmath.workdps(_LOG_GAMMA_DPS):
        return float(mpmath.loggamma(x))


def _stirling_tail(z):
    """ln Gamma(z) - [(z - 1/2) ln z - z + ln(2 pi)/2] for z >= 20."""
    zi = 1.0 / z
    zi2 = zi * zi
    acc = 0.0
    power = zi
    for coeff in _STIRLING:
        acc = acc + coeff * power
        power = power * zi2
    return acc


def log_gamma_ratio(x, d):
    """ln Gamma(x + d) - ln Gamma(x), accurate even when |d| << x.

    Subtracting two large ``lgamma`` values loses about ``log10(x ln x)``
    digits; for large arguments the Stirling expansions are differenced
    analytically instead, so the result keeps full relative precision.
    Works elementwise on arrays.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    x, d = np.broadcast_arrays(x, d)
    x1 = x + d
    if np.any(x <= 0) or np.any(x1 <= 0):
        raise DomainError("log_gamma_ratio needs x > 0 and x + d > 0")
    big = np.minimum(x, x1) >= _STIRLING_MIN
    out = np.empty(x.shape)
    if np.any(~big):
        out[~big] = sc.gammaln(x1[~big]) - sc.gammaln(x[~big])
    if np.any(big):
        xb, db, x1b = x[big], d[big], x1[big]
        out[big] = (
            (x1b - 0.5) * np.log1p(db / xb)
            + db * (np.log(xb) - 1.0)
            + _stirling_tail(x1b)
            - _stirling_tail(xb)
        )
    return out if out.ndim else float(out)


def _log_abs_gamma_sign(x: float) -> tuple[float, float]:
    if _is_nonpositive_integer(x):
        raise DomainError(f"Gamma has a pole at {x}")
    return math.lgamma(x), float(sc.gammasgn(x))


def beta(a: float, b: float) -> float:
    """Euler Beta function Gamma(a) Gamma(b) / Gamma(a + b) for a, b > 0."""
    a, b = float(a), float(b)
    if not (a > 0 and b > 0):
        raise DomainError(f"beta needs positive arguments, got ({a}, {b})")
    small, large = min(a, b), max(a, b)
    # ln B = ln Gamma(small) - [ln Gamma(large + small) - ln Gamma(large)]
    return math.exp(math.lgamma(small) - log_gamma_ratio(large, small))


def log_beta(a, b):
    """Vectorised ln B(a, b) for positive arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    small = np.minimum(a, b)
    large = np.maximum(a, b)
    return sc.gammaln(small) - log_gamma_ratio(large, small)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k = a (a+1) ... (a+k-1); (a)_0 = 1."""
    k = int(k)
    if k < 0:
        raise DomainError("pochhammer needs k >= 0")
    a = float(a)
    if k <= _EXACT_PRODUCT_MAX or a <= 0:
        return math.prod(a + j for j in range(k)) if k else 1.0
    return math.exp(log_gamma_ratio(a, k))


def gen_binom(s: float, k: int) -> float:
    """Generalised binomial coefficient C(s + k - 1, k) = (s)_k / k!.

    These are the Taylor coefficients of (1 - z)^(-s).
    """
    k = int(k)
    if k < 0:
        raise DomainError("gen_binom needs k >= 0")
    s = float(s)
    if k <= _EXACT_PRODUCT_MAX or s <= 0:
        out = 1.0
        for j in range(k):
            out *= (s + j) / (j + 1)
        return out
    # Gamma(k + s) / (Gamma(s) Gamma(k + 1))
    return math.exp(log_gamma_ratio(k + 1.0, s - 1.0) - math.lgamma(s))


def log_gen_binom(s: float, k):
    """Vectorised ln C(s + k - 1, k) for s > 0 and integer arrays k >= 0."""
    k = np.asarray(k, dtype=float)
    return log_gamma_ratio(k + 1.0, s - 1.0) - math.lgamma(s)


def hyp2f1_truncated(
    a: float,
    b: float,
    c: float,
    z: float,
    tol: float = 1e-15,
    max_terms: int = 100_000,
) -> SeriesResult:
    """Partial sum of the Gauss series 2F1(a, b; c; z) for |z| < 1.

    Terms are added until a rigorous bound on the remainder drops below
    ``tol * |partial sum|``.

    Remainder bound: with T_k the k-th term,
    T_{k+1} / T_k = z (a + k)(b + k) / ((c + k)(k + 1)), and for every k >= N
    (with c + N > 0)

        |a + k| / (k + 1) <= 1 + |a - 1| / (N + 1)
        |b + k| / |c + k| <= 1 + |b - c| / (c + N),

    because both right-hand sides decrease in k. Their product times |z| is
    a ratio bound r valid for all later terms, so the tail after N terms is
    at most |T_N| / (1 - r) whenever r < 1.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    if _is_nonpositive_integer(c):
        raise DomainError(f"c must not be a non-positive integer, got {c}")
    if not abs(z) < 1:
        raise DomainError(f"series needs |z| < 1, got {z}")

    total = 0.0
    term = 1.0
    bound = math.inf
    n = 0
    while n < max_terms:
        total += term
        n += 1
        term *= z * (a + n - 1) * (b + n - 1) / ((c + n - 1) * n)
        if term == 0.0:
            return SeriesResult(total, n, 0.0, True)
        if c + n > 0:
            r = abs(z) * (1 + abs(a - 1) / (n + 1)) * (1 + abs(b - c) / (c + n))
            if r < 1:
                bound = abs(term) / (1 - r)
                if bound <= tol * abs(total):
                    return SeriesResult(total, n, bound, True)
    return SeriesResult(total, n, bound, False)


def gauss_2f1_unit(a: float, b: float, c: float) -> float:
    """2F1(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b)).

    Raises DomainError when c - a - b <= 0 (the series diverges at z = 1).
    """
    a, b, c = float(a), float(b), float(c)
    if not c - a - b > 0:
        raise DomainError(f"2F1 diverges at z = 1 unless c - a - b > 0 (got {c - a - b})")
    sign = 1.0
    log_value = 0.0
    for arg, power in ((c, 1), (c - a - b, 1), (c - a, -1), (c - b, -1)):
        lg, sg = _log_abs_gamma_sign(arg)
        log_value += power * lg
        sign *= sg
    return sign * math.exp(log_value)
