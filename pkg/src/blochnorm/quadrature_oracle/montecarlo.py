"""Monte Carlo estimates of l(t) over the full n-dimensional ball."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import norm_constants as nc
from ..common import DomainError, Params, QuadResult
from .deterministic import quad_I_2d
from .sampling import PROPOSALS, McConfig, WeightedPoints, run_chunks

HALF_PI = math.pi / 2


def _check_t(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= HALF_PI:
        raise DomainError(f"t must lie in [0, pi/2], got {t}")
    return t


def integrand_pre(pts: WeightedPoints, p: Params, t: float) -> np.ndarray:
    """|(1 - w_1) cos t + w_2 sin t| / |1 - w_1|^(n+a+1)."""
    u = pts.one_minus_w1
    num = np.abs(u * math.cos(t) + pts.w[:, 1] * math.sin(t))
    return num / np.abs(u) ** (p.s + 1)


def _householder_first_two(d1, d2, target: tuple[float, float]):
    """First two coordinates of H d, H the real reflection with H e_1 = target.

    H only mixes the first two complex coordinates, so the rest of d is not needed.
    """
    v1, v2 = 1.0 - target[0], -target[1]
    vv = v1 * v1 + v2 * v2
    if vv == 0.0:
        return d1, d2
    proj = 2.0 * (v1 * d1 + v2 * d2) / vv
    return d1 - v1 * proj, d2 - v2 * proj


def integrand_post(pts: WeightedPoints, p: Params, t: float, sign: int = -1) -> np.ndarray:
    """|z_1 - cos t| / |1 - z_1 cos t + sign z_2 sin t|^(n+a+1) at z = H w.

    H reflects e_1 onto the singular point (cos t, -sign sin t, 0, ...), so the
    proposal's concentration lands where this integrand blows up. H is
    orthogonal, hence measure- and weight-preserving. Writing z = target + H d
    with d = w - e_1 gives z_1 - cos t = (H d)_1 and the denominator
    -cos t (H d)_1 + sign sin t (H d)_2, both free of cancellation.
    """
    c, s = math.cos(t), math.sin(t)
    h1, h2 = _householder_first_two(-pts.one_minus_w1, pts.w[:, 1], (c, -sign * s))
    return np.abs(h1) / np.abs(-c * h1 + sign * s * h2) ** (p.s + 1)


def _to_result(mean: float, stderr: float, count: int) -> QuadResult:
    return QuadResult(float(mean), 3.0 * float(stderr), int(count), float(stderr))


def mc_l_full(p: Params, t: float, cfg: McConfig, proposal: str = "boundary") -> QuadResult:
    """Unbiased estimate of l(t) = (n+a+1) int |(1-w_1) cos t + w_2 sin t| / |1-w_1|^(n+a+1) dv_alpha.

    ``proposal="uniform"`` weights uniform ball points by
    c_alpha (1 - |w|^2)^alpha vol(B^n); it is unbiased but its variance is
    infinite, so its standard error is not trustworthy. The default samples
    near the kernel's boundary singularity (see ``boundary_weighted``).
    """
    t = _check_t(t)
    draw = PROPOSALS[proposal]
    scale = (p.s + 1) * math.exp(nc.log_c_alpha(p))

    def estimator(rng, size):
        pts = draw(rng, p, size)
        return scale * integrand_pre(pts, p, t) * pts.weight

    stats = run_chunks(estimator, cfg)
    return _to_result(stats.mean[0], stats.stderr[0], stats.count)


@dataclass(frozen=True)
class OrthInvariance:
    lhs: QuadResult
    rhs: QuadResult
    rhs_flipped: QuadResult

    @property
    def passed(self) -> bool:
        ok = abs(self.lhs.value - self.rhs.value) <= 3 * (self.lhs.stderr + self.rhs.stderr)
        ok_flip = abs(self.lhs.value - self.rhs_flipped.value) <= 3 * (
            self.lhs.stderr + self.rhs_flipped.stderr
        )
        return ok and ok_flip


def orth_invariance_check(p: Params, t: float, cfg: McConfig) -> OrthInvariance:
    """L(xi_t) before and after the orthogonal change of variables, one sample stream.

    ``lhs`` integrates the pre-rotation form, ``rhs`` the post-rotation form
    |z_1 - cos t| / |1 - z_1 cos t - z_2 sin t|^(n+a+1) and ``rhs_flipped``
    the same with + z_2 sin t; the two post-rotation forms agree by the
    symmetry z_2 -> -z_2. All three are integrated against dv_alpha.
    """
    t = _check_t(t)
    c_alpha = math.exp(nc.log_c_alpha(p))

    def estimator(rng, size):
        pts = PROPOSALS["boundary"](rng, p, size)
        return c_alpha * pts.weight * np.stack(
            (
                integrand_pre(pts, p, t),
                integrand_post(pts, p, t, sign=-1),
                integrand_post(pts, p, t, sign=+1),
            )
        )

    stats = run_chunks(estimator, cfg)
    lhs, rhs, flip = (_to_result(stats.mean[i], stats.stderr[i], stats.count) for i in range(3))
    return OrthInvariance(lhs, rhs, flip)


@dataclass(frozen=True)
class FubiniCheck:
    mc_value: float
    mc_stderr: float
    reduced_value: float
    reduced_error: float
    passed: bool


def fubini_chain_check(p: Params, t: float, cfg: McConfig, tol: float = 1e-6) -> FubiniCheck:
    """Compare mc_l_full(t) with (n+a+1) c_alpha k_alpha I(cos t, sin t).

    Passes when the two differ by at most 3 standard errors plus ``tol``
    (relative to the reduced value) plus the quadrature's own error estimate.
    """
    mc = mc_l_full(p, t, cfg)
    quad = quad_I_2d(p, t)
    factor = math.exp(nc.log_chain_factor(p) - 2 * nc.LOG_PI)
    reduced = factor * quad.value
    reduced_err = factor * quad.error_estimate
    ok = abs(mc.value - reduced) <= 3 * mc.stderr + tol * abs(reduced) + reduced_err
    return FubiniCheck(mc.value, mc.stderr, reduced, reduced_err, bool(ok))
