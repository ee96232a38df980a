import math

import mpmath
import numpy as np
import pytest

from blochnorm import series_repr as sr
from blochnorm.common import DomainError, Params
from blochnorm.norm_constants import log_chain_factor
from blochnorm.quadrature_oracle import (
    McConfig,
    chunk_rng,
    circle_parseval,
    disk_kernel_2f1,
    fubini_chain_check,
    l_from_quad,
    mc_l_full,
    moebius_identity_check,
    orth_invariance_check,
    quad_I_2d,
    radial_beta,
    radial_moment,
    sample_ball,
)
from blochnorm.quadrature_oracle.sampling import boundary_weighted, run_chunks, uniform_weighted

HALF_PI = math.pi / 2
SMALL = McConfig(samples=200_000, seed=3)


# -- sampling -------------------------------------------------------------


def test_mc_config_validation():
    for kw in ({"samples": 0}, {"seed": -1}, {"seed": 2**64}, {"chunk_size": 0}, {"workers": 0}):
        with pytest.raises(DomainError):
            McConfig(**kw)
    assert McConfig(samples=10, chunk_size=4).chunk_sizes() == [4, 4, 2]


def test_sample_ball_points_inside_and_second_moment():
    cfg = McConfig(samples=1_000_000, seed=42)
    r2 = np.concatenate([np.sum(np.abs(z) ** 2, axis=1) for z in sample_ball(2, cfg.samples, cfg)])
    assert r2.size == 1_000_000
    assert np.all(r2 < 1)
    stderr = r2.std(ddof=1) / math.sqrt(r2.size)
    assert abs(r2.mean() - 2 / 3) <= 3 * stderr


def test_sample_ball_is_reproducible():
    cfg = McConfig(samples=5000, seed=9, chunk_size=1024)
    a = np.concatenate(list(sample_ball(3, 5000, cfg)))
    b = np.concatenate(list(sample_ball(3, 5000, cfg)))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, np.concatenate(list(sample_ball(3, 5000, McConfig(seed=10, chunk_size=1024)))))


def test_sample_ball_domain():
    with pytest.raises(DomainError):
        next(sample_ball(0, 10, SMALL))


def test_chunk_streams_are_independent_of_order():
    first = chunk_rng(5, 3).random(4)
    chunk_rng(5, 0).random(100)
    assert np.array_equal(first, chunk_rng(5, 3).random(4))


def test_run_chunks_bit_identical_across_workers():
    est = lambda rng, size: rng.standard_normal(size) ** 2  # noqa: E731
    one = run_chunks(est, McConfig(samples=300_000, seed=1, chunk_size=10_000, workers=1))
    many = run_chunks(est, McConfig(samples=300_000, seed=1, chunk_size=10_000, workers=8))
    assert one.mean.tobytes() == many.mean.tobytes()
    assert one.m2.tobytes() == many.m2.tobytes()


@pytest.mark.parametrize("proposal", [boundary_weighted, uniform_weighted])
def test_proposals_integrate_the_weighted_measure(proposal):
    # int (1-|w|^2)^alpha dv = pi^n Gamma(alpha+1) / Gamma(n+alpha+1) = 1 / c_alpha
    p = Params(3, 0.5)
    rng = chunk_rng(11, 0)
    pts = proposal(rng, p, 400_000)
    assert np.all(np.sum(np.abs(pts.w) ** 2, axis=1) < 1)
    expected = math.pi**3 * math.gamma(1.5) / math.gamma(4.5)
    se = pts.weight.std(ddof=1) / math.sqrt(pts.weight.size)
    assert abs(pts.weight.mean() - expected) <= 4 * se


def test_boundary_proposal_second_moment_against_closed_form():
    # E|w_2|^2 under dv_alpha = 1 / (n + alpha + 1)
    p = Params(2, 1.0)
    pts = boundary_weighted(chunk_rng(2, 0), p, 400_000)
    c_alpha = math.gamma(p.s + 1) / (math.gamma(p.alpha + 1) * math.pi**p.n)
    vals = c_alpha * pts.weight * np.abs(pts.w[:, 1]) ** 2
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean() - 1 / (p.s + 1)) <= 4 * se


# -- Monte Carlo estimates -----------------------------------------------


@pytest.mark.parametrize("t", [0.0, 0.8, HALF_PI])
def test_mc_l_full_matches_series(t):
    p = Params(3, 0.5)
    r = mc_l_full(p, t, SMALL)
    ref = sr.l_limit_zero(p) if t == 0 else sr.l_series(p, t).value
    assert r.evals == SMALL.samples
    assert r.error_estimate == pytest.approx(3 * r.stderr)
    assert abs(r.value - ref) <= 3 * r.stderr


def test_mc_l_full_three_pi_at_right_endpoint():
    r = mc_l_full(Params(2, 0), HALF_PI, McConfig(samples=1_000_000))
    assert abs(r.value - 3 * math.pi) <= 3 * r.stderr


def test_mc_l_full_rejects_bad_t():
    with pytest.raises(DomainError):
        mc_l_full(Params(2, 0), -0.1, SMALL)


def test_uniform_proposal_is_unbiased_but_noisy():
    p = Params(2, 0)
    r = mc_l_full(p, 1.0, McConfig(samples=400_000, seed=5), proposal="uniform")
    ref = sr.l_series(p, 1.0).value
    assert abs(r.value - ref) / ref < 0.1


@pytest.mark.parametrize("n, alpha, t", [(2, 0, 0.6), (4, 0, HALF_PI), (3, 0.5, 1.1)])
def test_orth_invariance(n, alpha, t):
    r = orth_invariance_check(Params(n, alpha), t, McConfig(samples=1_000_000))
    assert r.passed
    assert abs(r.lhs.value - r.rhs.value) < 3 * (r.lhs.stderr + r.rhs.stderr)


def test_orth_invariance_exact_at_zero():
    r = orth_invariance_check(Params(3, 0.5), 0.0, SMALL)
    assert r.lhs.value == r.rhs.value


def test_orth_invariance_scales_to_mc_l_full():
    p = Params(2, 1.0)
    r = orth_invariance_check(p, 0.9, SMALL)
    full = mc_l_full(p, 0.9, SMALL)
    assert full.value == pytest.approx((p.s + 1) * r.lhs.value, rel=1e-12)


@pytest.mark.parametrize("n, alpha, t", [(2, 0, HALF_PI), (3, 0, 1.0), (2, 2, 0.3)])
def test_fubini_chain(n, alpha, t):
    r = fubini_chain_check(Params(n, alpha), t, McConfig(samples=1_000_000))
    assert r.passed


# -- deterministic quadrature --------------------------------------------


@pytest.mark.parametrize("nu", [1.0, 2.5, 9.0, 40.0])
def test_disk_kernel_matches_mpmath(nu):
    w = np.array([0.9, 0.5, 0.2, 0.03, 1e-3, 1e-8])
    got = disk_kernel_2f1(nu, 1 - w, w)
    with mpmath.workdps(40):
        ref = [float(mpmath.hyp2f1(nu / 2, nu / 2, nu + 1, 1 - mpmath.mpf(x))) for x in w]
    np.testing.assert_allclose(got, ref, rtol=1e-12)


def test_quad_I_examples():
    p = Params(2, 0)
    assert quad_I_2d(p, HALF_PI).value == pytest.approx(math.pi**3 / 2, rel=1e-8)
    assert quad_I_2d(p, math.pi / 4).value == pytest.approx(13.331, abs=1e-3)
    q = Params(2, 1)
    assert l_from_quad(q, 1.2).value == pytest.approx(sr.l_series(q, 1.2).value, rel=1e-4)


@pytest.mark.parametrize("n, alpha", [(2, -0.5), (3, 0.5), (4, 2.5), (6, 10.0)])
def test_quad_chain_identity(n, alpha):
    p = Params(n, alpha)
    factor = math.exp(log_chain_factor(p) - 2 * math.log(math.pi))
    for t in (0.1, 0.7, 1.3, HALF_PI):
        q = quad_I_2d(p, t)
        assert q.converged
        assert factor * q.value == pytest.approx(sr.l_series(p, t).value, rel=1e-7)


def test_quad_budget_exhaustion_is_reported():
    q = quad_I_2d(Params(3, 0.5), 0.05, tol=1e-15, max_level=1)
    assert not q.converged
    assert q.error_estimate > 0


def test_quad_rejects_zero():
    with pytest.raises(DomainError):
        quad_I_2d(Params(2, 0), 0.0)


@pytest.mark.parametrize(
    "s, q, expected",
    [(2.0, 0.5, 8 * math.pi / 3), (3.7, 0.0, 2 * math.pi), (4.0, 0.5, 160 * math.pi / 27)],
)
def test_circle_parseval_examples(s, q, expected):
    r = circle_parseval(s, q)
    assert r.closed_series == pytest.approx(expected, rel=1e-13)
    assert r.direct_quadrature == pytest.approx(expected, rel=1e-13)


def test_circle_parseval_grid():
    for s in (2.0, 3.5, 5.0, 8.0):
        for q in (0.0, 0.3, 0.7, 0.95):
            r = circle_parseval(s, q)
            assert r.direct_quadrature == pytest.approx(r.closed_series, rel=1e-8)
            assert abs(r.direct_quadrature - r.closed_series) <= r.series_bound + r.quadrature_error + 1e-13 * r.closed_series


def test_circle_parseval_domain():
    with pytest.raises(DomainError):
        circle_parseval(2.0, 1.0)
    with pytest.raises(DomainError):
        circle_parseval(0.0, 0.5)


@pytest.mark.parametrize("k, s, expected", [(0, 0.0, 0.5), (1, 1.0, 1 / 12), (0, 0.5, 1 / 3)])
def test_radial_beta_examples(k, s, expected):
    r = radial_beta(k, s)
    assert r.closed == pytest.approx(expected, rel=1e-14)
    assert r.quadrature == pytest.approx(expected, rel=1e-10)


def test_radial_beta_grid():
    for k in range(11):
        for s in (-0.9, -0.5, -0.1, 0.0, 0.5, 2.0, 5.5, 10.0):
            r = radial_beta(k, s)
            assert r.quadrature == pytest.approx(r.closed, rel=1e-10)


def test_radial_moment_second_form():
    # int r^(2m+2) (1-r^2)^(k+s-1) dr = B(m+3/2, k+s) / 2
    r = radial_moment(2 * 3 + 2, 2 + 2.5 - 1)
    assert r.closed == pytest.approx(0.5 * math.gamma(4.5) * math.gamma(4.5) / math.gamma(9.0), rel=1e-13)
    assert r.quadrature == pytest.approx(r.closed, rel=1e-10)


def test_radial_domain():
    with pytest.raises(DomainError):
        radial_beta(0, -1.0)
    with pytest.raises(DomainError):
        radial_beta(-1, 0.0)


def test_moebius_examples():
    r = moebius_identity_check(0.0, 0.5)
    assert r.zeta == 0.5
    assert r.residuals == (0.0, 0.0, 0.0)
    r = moebius_identity_check(0.3 + 0.4j, 0.7)
    assert max(r.residuals) < 1e-12


def test_moebius_random_points():
    rng = np.random.default_rng(0)
    rad = np.sqrt(rng.uniform(0, 1, 1000)) * (1 - 1e-9)
    ang = rng.uniform(0, 2 * math.pi, 1000)
    cs = rng.uniform(0, 1, 1000)
    for i in range(1000):
        r = moebius_identity_check(rad[i] * complex(math.cos(ang[i]), math.sin(ang[i])), cs[i])
        assert max(r.residuals) < 1e-12
        assert r.jacobian_fd_residual < 1e-6


def test_moebius_domain():
    with pytest.raises(DomainError):
        moebius_identity_check(1.0, 0.5)
    with pytest.raises(DomainError):
        moebius_identity_check(0.1, 1.0)
