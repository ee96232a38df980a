"""Deterministic quadratures for the integrals of the reduction chain.

The reduced integral

    I(cos t, sin t) = int_{B^2} |z_1 - c| (1 - |z|^2)^(n+a-2) / |1 - z_1 c - z_2 s|^(n+a+1) dv_2

is computed with its z_2-integral in closed form (circle expansion plus a
radial Beta integral, i.e. a 2F1) and its z_1-integral by a tensor rule in
polar coordinates centred at the near-singular point z_1 = c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy import special as sc

from ..common import DomainError, Params, QuadResult
from ..special_fn import beta, hyp2f1_truncated

HALF_PI = math.pi / 2
_SERIES_EPS = 1e-17
_SERIES_MAX = 20_000


def disk_kernel_2f1(nu: float, z, one_minus_z):
    """F(z) = 2F1(nu/2, nu/2; nu+1; z) on 0 <= z < 1, vectorised.

    Below z = 1 - w* the Gauss series is summed directly. Above, the
    expansion about z = 1 for the logarithmic case c = a + b + 1 is used:

        F = G(2a+1)/G(a+1)^2 + (1-z) G(2a+1)/G(a)^2
            * sum_j (a+1)_j^2 / (j! (j+1)!) (1-z)^j
              [ln(1-z) - psi(j+1) - psi(j+2) + 2 psi(a+j+1)],   a = nu/2.

    ``one_minus_z`` is passed separately so that it keeps full relative
    precision near z = 1. The expansion cancels badly for large a unless
    1 - z is small, hence w* = min(1/4, 1/a^2); relative accuracy stays
    near 1e-13 up to nu = 40.
    """
    a = 0.5 * nu
    w_switch = 0.25 * min(1.0, (2.0 / a) ** 2)
    z = np.asarray(z, dtype=float)
    w = np.asarray(one_minus_z, dtype=float)
    out = np.empty(z.shape)
    low = w >= w_switch

    if np.any(low):
        zl = z[low]
        term = np.ones_like(zl)
        acc = np.ones_like(zl)
        for k in range(_SERIES_MAX):
            term = term * (a + k) ** 2 / ((2 * a + 1 + k) * (k + 1)) * zl
            acc = acc + term
            if np.all(np.abs(term) <= _SERIES_EPS * acc):
                break
        out[low] = acc

    high = ~low
    if np.any(high):
        wh = w[high]
        logw = np.log(wh)
        coeff = 1.0
        psi_sum = -sc.digamma(1.0) - sc.digamma(2.0) + 2 * sc.digamma(a + 1.0)
        power = np.ones_like(wh)
        acc = coeff * (logw + psi_sum)
        for j in range(_SERIES_MAX):
            coeff *= (a + 1 + j) ** 2 / ((j + 1) * (j + 2))
            psi_sum += -1.0 / (j + 1) - 1.0 / (j + 2) + 2.0 / (a + 1 + j)
            power = power * wh
            term = coeff * power * (logw + psi_sum)
            acc = acc + term
            if np.all(np.abs(term) <= _SERIES_EPS * np.abs(acc)) and j > 4:
                break
        lg = math.lgamma(2 * a + 1)
        out[high] = math.exp(lg - 2 * math.lgamma(a + 1)) + wh * math.exp(lg - 2 * math.lgamma(a)) * acc
    return out


@lru_cache(maxsize=64)
def _jacobi_rule(order: int, nu: float):
    x, w = sc.roots_jacobi(order, nu, 0.0)
    return (x + 1.0) / 2.0, w


def _quad_I_level(nu: float, c: float, s: float, n_r: int, n_psi: int) -> float:
    psi = 2.0 * math.pi * np.arange(n_psi) / n_psi
    cp = np.cos(psi)
    disc = np.sqrt(c * c * cp * cp + s * s)
    R_far = c * cp + disc  # 1 - |c + r e^{i psi}|^2 = (R - r)(r + R_far)
    R = s * s / R_far
    u, wts = _jacobi_rule(n_r, nu)
    # r = R u^2 turns the r^2 ln r term of F at the centre into u^5 ln u
    r = R[:, None] * (u * u)[None, :]
    z1 = c + r * np.exp(1j * psi)[:, None]
    A = np.abs(1.0 - z1 * c)
    one_minus_z = (r / A) ** 2
    F = disk_kernel_2f1(nu, 1.0 - one_minus_z, one_minus_z)
    g = ((r + R_far[:, None]) / A) ** nu * F
    # (R - r)^nu dr = R^(nu+1) (1-u)^nu (1+u)^nu 2u du; the Jacobi rule on [-1, 1]
    # for (1-x)^nu contributes the factor 2^-(nu+1)
    h = g * ((1.0 + u) ** nu * 2.0 * u)[None, :]
    radial = (h * wts[None, :]).sum(axis=1) * (R / 2.0) ** (nu + 1)
    return math.pi / nu * 2.0 * math.pi * float(radial.mean())


def quad_I_2d(p: Params, t: float, tol: float = 1e-8, max_level: int = 6) -> QuadResult:
    """I(cos t, sin t) for 0 < t <= pi/2.

    With W = 1 - |z_1|^2, A = 1 - z_1 c and nu = n+a-1 the z_2-integral is
    pi W^nu / (nu |A|^(nu+2)) * 2F1(nu/2+1, nu/2+1; nu+1; zeta) with
    zeta = W s^2 / |A|^2, and 1 - zeta = |z_1 - c|^2 / |A|^2. After an Euler
    transformation the |z_1 - c|^-1 singularity is explicit and cancelled
    by the polar Jacobian about z_1 = c, leaving

        I = (pi / nu) int_0^{2 pi} dpsi int_0^R(psi) W^nu |A|^-nu F(zeta) dr.

    W^nu = (R - r)^nu (r + R_far)^nu is handled by a Gauss-Jacobi rule in
    u = sqrt(r / R), psi by the periodic trapezoid rule. Orders double until
    two successive levels agree to ``tol`` (relative).
    """
    t = float(t)
    if not 0.0 < t <= HALF_PI:
        raise DomainError(f"t must lie in (0, pi/2], got {t}")
    nu = p.s - 1.0
    c = 0.0 if t == HALF_PI else math.cos(t)
    s = math.sin(t)
    prev = None
    evals = 0
    for level in range(max_level + 1):
        n_r, n_psi = 8 << level, 32 << level
        value = _quad_I_level(nu, c, s, n_r, n_psi)
        evals += n_r * n_psi
        if prev is not None:
            err = abs(value - prev)
            if err <= tol * abs(value):
                return QuadResult(value, err, evals)
        prev = value
    return QuadResult(value, err, evals, converged=False)


def l_from_quad(p: Params, t: float, tol: float = 1e-8) -> QuadResult:
    """l(t) = (n+a+1) c_alpha k_alpha I(cos t, sin t)."""
    from .. import norm_constants as nc

    q = quad_I_2d(p, t, tol)
    f = math.exp(nc.log_chain_factor(p) - 2 * nc.LOG_PI)
    return QuadResult(f * q.value, f * q.error_estimate, q.evals, 0.0, q.converged)


@dataclass(frozen=True)
class CircleParseval:
    closed_series: float
    direct_quadrature: float
    series_bound: float
    quadrature_error: float


def circle_parseval(s: float, q: float, tol: float = 1e-15) -> CircleParseval:
    """int_0^{2 pi} |1 - q e^{i theta}|^-s dtheta two ways.

    Closed series: 2 pi sum_k C(s/2+k-1, k)^2 q^(2k) = 2 pi 2F1(s/2, s/2; 1; q^2).
    Direct: periodic trapezoid rule, doubled until consecutive levels agree.
    """
    s, q = float(s), float(q)
    if not s > 0:
        raise DomainError("s must be positive")
    if not 0.0 <= q < 1.0:
        raise DomainError(f"q must lie in [0, 1), got {q}")
    series = hyp2f1_truncated(s / 2, s / 2, 1.0, q * q, tol=tol)
    closed = 2 * math.pi * series.value
    prev = None
    npts = 16
    while True:
        theta = 2 * math.pi * np.arange(npts) / npts
        val = 2 * math.pi * float(np.mean(np.abs(1.0 - q * np.exp(1j * theta)) ** -s))
        if prev is not None and (abs(val - prev) <= 1e-15 * val or npts >= 1 << 20):
            return CircleParseval(closed, val, 2 * math.pi * series.tail_bound, abs(val - prev))
        prev = val
        npts *= 2


@dataclass(frozen=True)
class RadialBeta:
    closed: float
    quadrature: float


def radial_moment(a: float, s: float) -> RadialBeta:
    """int_0^1 rho^a (1 - rho^2)^s drho = B((a+1)/2, s+1) / 2, closed and by quadrature.

    The quadrature works in u = rho^2; for s < 0 it further substitutes
    v = (1 - u)^(s+1), which turns the endpoint singularity into a smooth
    integrand: int_0^1 u^p (1-u)^s du = int_0^1 (1 - v^(1/(s+1)))^p dv / (s+1).
    """
    a, s = float(a), float(s)
    if not (a > -1 and s > -1):
        raise DomainError("need exponent a > -1 and s > -1")
    p = (a - 1) / 2
    closed = 0.5 * beta(p + 1, s + 1)
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=500)
    if s < 0:
        val, _ = integrate.quad(lambda v: (1.0 - v ** (1.0 / (s + 1))) ** p, 0.0, 1.0, **opts)
        val /= s + 1
    else:
        val, _ = integrate.quad(lambda u: u**p * (1.0 - u) ** s, 0.0, 1.0, **opts)
    return RadialBeta(closed, 0.5 * val)


def radial_beta(k: int, s: float) -> RadialBeta:
    """int_0^1 rho^(2k+1) (1 - rho^2)^s drho = B(k+1, s+1) / 2."""
    if k < 0:
        raise DomainError("k must be >= 0")
    return radial_moment(2 * k + 1, s)
