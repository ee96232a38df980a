"""Series representations of l(t) and phi(x) with truncation control.

Two routes are implemented:

* the closed single series  l(t) = C_alpha sin^2 t sum_m a_m cos^{2m} t,
  a_m = Gamma(m+1/2) Gamma(m+3/2) / (m!)^2;
* the double series obtained before the k-sum is collapsed by Gauss's
  theorem, evaluated term by term.

``S(x) = (1 - x) sum_m a_m x^m`` is the normalised quantity both phi and l
are built from; ``phi(x) = Gamma(n+a-1) / Gamma((n+a)/2+1)^2 * S(x)`` and
``l(t) = C_alpha * S(cos^2 t)``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sc

from . import norm_constants as nc
from .common import DomainError, Params, SeriesResult
from .special_fn import log_beta, log_gamma_ratio, log_gen_binom

HALF_PI = math.pi / 2
A0 = math.pi / 2
# Above this x the plain power series is replaced by the Abel form.
ABEL_SWITCH = 0.9
DEFAULT_TOL = 1e-12
DEFAULT_MAX_TERMS = 1_000_000
DOUBLE_SERIES_X_CAP = 0.999
_COLUMN_BLOCK = 256
SCAN_EPS = 1e-3


# ---------------------------------------------------------------------------
# coefficients


@lru_cache(maxsize=32)
def _a_table(size: int) -> np.ndarray:
    m = np.arange(size, dtype=float)
    # ln a_m = [lnG(m+1/2) - lnG(m+1)] + [lnG(m+3/2) - lnG(m+1)]
    log_a = log_gamma_ratio(m + 1.0, -0.5) + log_gamma_ratio(m + 1.0, 0.5)
    out = np.exp(log_a)
    out.setflags(write=False)
    return out


def _coeffs(count: int) -> np.ndarray:
    size = 1 << max(6, (count - 1).bit_length())
    return _a_table(size)[:count]


def coeff_a(m: int) -> float:
    """a_m = Gamma(m+1/2) Gamma(m+3/2) / (m!)^2; a_0 = pi/2 and a_m decreases to 1."""
    if m < 0:
        raise DomainError("coefficient index must be >= 0")
    return float(np.exp(log_gamma_ratio(m + 1.0, -0.5) + log_gamma_ratio(m + 1.0, 0.5)))


def coeff_a_ratio(m: int) -> float:
    """a_{m+1} / a_m = (m + 1/2)(m + 3/2) / (m + 1)^2 < 1."""
    if m < 0:
        raise DomainError("coefficient index must be >= 0")
    return (m + 0.5) * (m + 1.5) / (m + 1) ** 2


def abel_coeff(m: int) -> float:
    """b_0 = a_0, b_m = a_m - a_{m-1} for m >= 1.

    From the ratio formula, a_m - a_{m-1} = -a_{m-1} / (4 m^2) exactly, which
    is how it is evaluated (no cancellation).
    """
    if m < 0:
        raise DomainError("coefficient index must be >= 0")
    if m == 0:
        return A0
    return -coeff_a(m - 1) / (4.0 * m * m)


# ---------------------------------------------------------------------------
# S(x) = (1 - x) sum a_m x^m


def _sum_direct(x, one_minus_x, tol, max_terms):
    """Plain power series; tail after M terms is <= a_M x^M / (1 - x)."""
    count = 64
    while True:
        count = min(count, max_terms + 1)
        a = _coeffs(count)
        powers = x ** np.arange(count)
        partial = np.cumsum(a * powers)
        # bound on (1 - x) * tail after M terms, M = 1..count-1
        bounds = a[1:] * powers[1:]
        values = one_minus_x * partial[:-1]
        ok = np.nonzero(bounds <= tol * values)[0]
        if ok.size:
            j = int(ok[0])
            return float(values[j]), j + 1, float(bounds[j]), True
        if count > max_terms:
            return float(values[-1]), count - 1, float(bounds[-1]), False
        count *= 4


def _sum_abel(x, tol, max_terms):
    """Abel form a_0 + sum_{m>=1} b_m x^m with b_m = -a_{m-1} / (4 m^2).

    For the tail R_M = sum_{m>=M} b_m x^m, since 1 < a_{m-1} <= a_{M-1}
    (a decreases to 1),

        -a_{M-1} T_M / 4 <= R_M <= -T_M / 4,  T_M = sum_{m>=M} x^m / m^2,

    and T_M = Li2(x) - sum_{m<M} x^m / m^2 is available in closed form. The
    tail is replaced by the midpoint of that enclosure and the half-width
    (a_{M-1} - 1) T_M / 8 is reported as the bound; it is never looser than
    the cruder estimate |b_m| <= |b_M| (M/m)^2.
    """
    li2 = float(sc.spence(1.0 - x))
    count = 256
    while True:
        count = min(count, max_terms + 1)
        a = _coeffs(count)
        m = np.arange(1, count, dtype=float)
        xm = x**m
        b = -a[:-1] / (4.0 * m * m)
        partial = A0 + np.concatenate(([0.0], np.cumsum(b * xm)))  # first M terms, M = 1..count
        inv_sq = np.concatenate(([0.0], np.cumsum(xm / (m * m))))
        # T_M for M = 1..count, guarded against cancellation in li2 - partial
        T = np.maximum(li2 - inv_sq, 0.0) + 4 * np.finfo(float).eps * li2
        # a[M-1] for M = 1..count is just a
        values = partial - (a + 1.0) * T / 8.0
        bounds = (a - 1.0) * T / 8.0
        ok = np.nonzero(bounds <= tol * values)[0]
        if ok.size:
            j = int(ok[0])
            return float(values[j]), j + 1, float(bounds[j]), True
        if count > max_terms:
            return float(values[-1]), count, float(bounds[-1]), False
        count *= 4


def _normalized_sum(x, one_minus_x, tol, max_terms, abel=None):
    if x == 0.0:
        return A0, 1, 0.0, True
    if abel is None:
        abel = x >= ABEL_SWITCH
    if abel:
        return _sum_abel(x, tol, max_terms)
    return _sum_direct(x, one_minus_x, tol, max_terms)


def log_phi_prefactor(p: Params) -> float:
    """ln[Gamma(n+a-1) / Gamma((n+a)/2+1)^2]."""
    return math.lgamma(p.s - 1) - 2 * math.lgamma(p.s / 2 + 1)


def phi_eval(
    p: Params,
    x: float,
    tol: float = DEFAULT_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
    *,
    form: str = "auto",
) -> SeriesResult:
    """phi(x) for 0 <= x < 1; ``tol`` is relative to the returned value.

    ``form`` selects the power-series form ("direct"), the Abel form
    ("abel") or picks by x ("auto": Abel for x >= 0.9).
    """
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise DomainError(f"phi needs 0 <= x < 1, got {x}")
    abel = {"auto": None, "direct": False, "abel": True}[form]
    value, terms, bound, ok = _normalized_sum(x, 1.0 - x, tol, max_terms, abel)
    scale = math.exp(log_phi_prefactor(p))
    return SeriesResult(scale * value, terms, scale * bound, ok)


def l_series(
    p: Params,
    t: float,
    tol: float = DEFAULT_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> SeriesResult:
    """l(t) from the closed single series, for 0 < t <= pi/2."""
    t = float(t)
    if t == 0.0:
        raise DomainError("the series is stated for t > 0; use l_limit_zero for t = 0")
    if not 0.0 < t <= HALF_PI:
        raise DomainError(f"t must lie in (0, pi/2], got {t}")
    C = math.exp(nc.log_C_alpha(p))
    if t == HALF_PI:
        return SeriesResult(C * A0, 1, 0.0, True)
    x = math.cos(t) ** 2
    value, terms, bound, ok = _normalized_sum(x, math.sin(t) ** 2, tol, max_terms)
    return SeriesResult(C * value, terms, C * bound, ok)


def l_limit_zero(p: Params) -> float:
    """l(0) = C_alpha, the Abel limit of the series as t -> 0+."""
    return math.exp(nc.log_C_alpha(p))


# ---------------------------------------------------------------------------
# k-sums and the double series


def ksum_closed(p: Params, m: int) -> float:
    """Gamma(m + 1/2) / Gamma(m + 1 + (n+a)/2)^2, the k-sum after Gauss summation."""
    return math.exp(math.lgamma(m + 0.5) - 2 * math.lgamma(m + 1 + p.s / 2))


def _richardson(partials: np.ndarray, gamma: np.ndarray):
    """Extrapolate partial sums S(K_j), K_j = K_0 2^j, to K -> infinity.

    ``partials`` has shape (levels, ...). The remainder of a series whose
    terms expand in powers k^-(gamma+1), k^-(gamma+2), ... has the form
    sum_i d_i K^-(gamma+i) (Euler-Maclaurin), so each Richardson column
    removes one of those powers. Returns (estimate, error estimate).
    """
    table = [np.asarray(row, dtype=float) for row in partials]
    prev_diag = table[0]
    diag = table[0]
    for i in range(1, len(table)):
        factor = 2.0 ** np.minimum(gamma + (i - 1), 900.0)
        table = [
            (factor * table[j] - table[j - 1]) / (factor - 1.0) for j in range(1, len(table))
        ]
        prev_diag, diag = diag, table[-1]
    err = np.abs(diag - prev_diag)
    return diag, err


def _k_ladder(p: Params, m_lo: int = 0) -> tuple[int, int]:
    """Base truncation K_0 (power of two, past the peak term) and level count.

    The low-m columns decay slowest in k and get two extra doublings; for
    larger m six levels already reach rounding level.
    """
    s1 = (p.s + 1) / 2
    c = p.s + 1.5
    peak = max(0.0, (s1 * s1 - c) / 1.5)
    k0 = 128
    while k0 < 4 * peak:
        k0 *= 2
    return k0, 8 if m_lo < _COLUMN_BLOCK else 6


def ksum_direct(p: Params, m: int, base_terms: int = 256, levels: int = 6) -> SeriesResult:
    """sum_k C(s1+k-1, k)^2 k! / Gamma(k + n+a+m+3/2), summed term by term.

    s1 = (n+a+1)/2. Terms decay only like k^-(m+3/2), so partial sums at
    base_terms * 2^j are Richardson-extrapolated; ``tail_bound`` is the
    difference of the last two extrapolants (an estimate, not a bound).
    """
    s1 = (p.s + 1) / 2
    c = p.s + m + 1.5
    kmax = base_terms << (levels - 1)
    k = np.arange(kmax, dtype=float)
    log_terms = 2 * log_gen_binom(s1, k) + sc.gammaln(k + 1) - sc.gammaln(k + c)
    csum = np.cumsum(np.exp(log_terms))
    idx = [(base_terms << j) - 1 for j in range(levels)]
    value, err = _richardson(csum[idx], np.float64(m + 0.5))
    return SeriesResult(float(value), kmax, float(err), True)


_column_lock = threading.Lock()
_column_cache: dict[tuple[int, float], tuple[np.ndarray, np.ndarray]] = {}


def _double_series_block(p: Params, m_lo: int, m_hi: int):
    """Column coefficients D_m and their k-extrapolation errors, m in [m_lo, m_hi).

    D_m = C(s2+m-1, m)^2 sum_k C(s1+k-1, k)^2 B(k+1, n+a-1) B(m+3/2, k+n+a),
    with s1 = (n+a+1)/2, s2 = (n+a+2)/2.
    """
    s = p.s
    s1, s2 = (s + 1) / 2, (s + 2) / 2
    k0, levels = _k_ladder(p, m_lo)
    kmax = k0 << (levels - 1)
    k = np.arange(kmax, dtype=float)
    m = np.arange(m_lo, m_hi, dtype=float)[:, None]
    # k-only part: 2 ln C(s1+k-1,k) + ln B(k+1, s-1) + ln Gamma(k+s)
    k_part = 2 * log_gen_binom(s1, k) + log_beta(k + 1, s - 1) + sc.gammaln(k + s)
    # ln Gamma(m+3/2) - ln Gamma(m+k+s+3/2), kept accurate for large m
    log_terms = k_part[None, :] - log_gamma_ratio(m + 1.5, k[None, :] + s)
    csum = np.cumsum(np.exp(log_terms), axis=1)
    idx = [(k0 << j) - 1 for j in range(levels)]
    ksum, err = _richardson(csum[:, idx].T, m[:, 0] + 0.5)
    w = np.exp(2 * log_gen_binom(s2, m[:, 0]))
    return w * ksum, w * err


def _double_series_columns(p: Params, count: int):
    key = (p.n, p.alpha)
    with _column_lock:
        cols, errs = _column_cache.get(key, (np.empty(0), np.empty(0)))
    if cols.size >= count:
        return cols[:count], errs[:count]
    new_c, new_e = [cols], [errs]
    m_lo = cols.size
    while m_lo < count:
        c, e = _double_series_block(p, m_lo, m_lo + _COLUMN_BLOCK)
        new_c.append(c)
        new_e.append(e)
        m_lo += _COLUMN_BLOCK
    cols, errs = np.concatenate(new_c), np.concatenate(new_e)
    with _column_lock:
        _column_cache[key] = (cols, errs)
    return cols[:count], errs[:count]


def l_double_series(
    p: Params,
    t: float,
    tol: float = 1e-10,
    max_terms: int = 200_000,
    x_cap: float = DOUBLE_SERIES_X_CAP,
) -> SeriesResult:
    """l(t) from the double series in (k, m), scaled by (n+a+1) c_alpha k_alpha pi^2.

    The sum over k is evaluated directly (no Gauss summation) with
    Richardson extrapolation of its algebraic tail; the sum over m is cut
    once a geometric estimate of the remainder plus the accumulated
    k-extrapolation errors fall below ``tol`` relative to the value.
    ``tail_bound`` is an error estimate.
    """
    t = float(t)
    if not 0.0 < t <= HALF_PI:
        raise DomainError(f"t must lie in (0, pi/2], got {t}")
    x = 0.0 if t == HALF_PI else math.cos(t) ** 2
    one_minus_x = 1.0 if t == HALF_PI else math.sin(t) ** 2
    if x > x_cap:
        raise DomainError(f"cos^2 t = {x:.6g} exceeds the double-series cap {x_cap}")
    scale = math.exp(nc.log_chain_factor(p)) * one_minus_x

    count = _COLUMN_BLOCK
    while True:
        count = min(count, max_terms)
        cols, errs = _double_series_columns(p, count)
        if x == 0.0:
            value, err = cols[0], errs[0]
            return SeriesResult(float(scale * value), 1, float(scale * err), True)
        xm = x ** np.arange(count)
        terms = cols * xm
        partial = np.cumsum(terms)
        kerr = np.cumsum(errs * xm)
        # geometric remainder estimate from the observed column ratio
        ratio = np.ones(count)
        ratio[1:] = cols[1:] / cols[:-1]
        q = x * np.maximum(ratio, 1.0)
        with np.errstate(divide="ignore"):
            tail = np.where(q < 1.0, terms * q / (1.0 - q), np.inf)
        total_err = tail + kerr
        ok = np.nonzero(total_err <= tol * partial)[0]
        if ok.size:
            j = int(ok[0])
            return SeriesResult(float(scale * partial[j]), j + 1, float(scale * total_err[j]), True)
        # once the m-tail is negligible more columns cannot reduce the k-error
        done = np.nonzero(tail <= 0.5 * tol * partial)[0]
        if done.size:
            j = int(done[0])
            return SeriesResult(float(scale * partial[j]), j + 1, float(scale * total_err[j]), False)
        if count >= max_terms:
            return SeriesResult(float(scale * partial[-1]), count, float(scale * total_err[-1]), False)
        count *= 2


# ---------------------------------------------------------------------------
# monotonicity scan


@dataclass(frozen=True)
class ScanResult:
    is_increasing: bool
    argmax: float
    max_value: float
    t: np.ndarray
    values: np.ndarray
    bounds: np.ndarray


def scan_monotone(
    p: Params,
    grid_size: int,
    eps: float = SCAN_EPS,
    tol: float = DEFAULT_TOL,
) -> ScanResult:
    """Evaluate l on {0} plus a uniform grid over [eps, pi/2] and test strict increase.

    ``grid_size`` counts all points including t = 0, where l(0) = C_alpha is
    taken from the closed-form limit. An increase only counts when it
    exceeds the sum of both truncation bounds.
    """
    if grid_size < 2:
        raise DomainError("grid_size must be >= 2")
    if grid_size == 2:
        ts = np.array([HALF_PI])
    else:
        ts = np.linspace(eps, HALF_PI, grid_size - 1)
        ts[-1] = HALF_PI
    vals = [l_limit_zero(p)]
    bnds = [0.0]
    for t in ts:
        r = l_series(p, float(t), tol)
        vals.append(r.value)
        bnds.append(r.tail_bound)
    t_all = np.concatenate(([0.0], ts))
    values = np.array(vals)
    bounds = np.array(bnds)
    gaps = np.diff(values) - (bounds[1:] + bounds[:-1])
    i = int(np.argmax(values))
    return ScanResult(bool(np.all(gaps > 0)), float(t_all[i]), float(values[i]), t_all, values, bounds)
