import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochnorm.common import DomainError
from blochnorm.special_fn import (
    beta,
    gauss_2f1_unit,
    gen_binom,
    hyp2f1_truncated,
    log_beta,
    log_gamma,
    log_gamma_ratio,
    log_gen_binom,
    pochhammer,
)


@pytest.mark.parametrize(
    "x, expected",
    [(1.0, 0.0), (5.0, math.log(24)), (0.5, 0.5 * math.log(math.pi))],
)
def test_log_gamma_examples(x, expected):
    assert log_gamma(x) == pytest.approx(expected, rel=1e-15, abs=1e-300)


def test_log_gamma_matches_mpmath_to_1e13():
    rng = np.random.default_rng(7)
    xs = np.concatenate(
        [
            np.exp(rng.uniform(math.log(1e-8), math.log(1e4), 500)),
            1.0 + rng.uniform(-0.01, 0.01, 50),
            2.0 + rng.uniform(-0.01, 0.01, 50),
        ]
    )
    with mpmath.workdps(40):
        for x in xs:
            ref = float(mpmath.loggamma(x))
            assert abs(log_gamma(x) - ref) <= 1e-13 * abs(ref)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_log_gamma_rejects_nonpositive(x):
    with pytest.raises(DomainError):
        log_gamma(x)


def test_log_gamma_recurrence_1000_points():
    xs = np.random.default_rng(42).uniform(0.1, 500.0, 1000)
    worst = max(abs(math.expm1(log_gamma(x + 1) - log_gamma(x) - math.log(x))) for x in xs)
    assert worst <= 1e-12


@given(st.floats(0.1, 500.0))
def test_log_gamma_recurrence_property(x):
    assert abs(math.expm1(log_gamma(x + 1) - log_gamma(x) - math.log(x))) <= 1e-12


def test_log_gamma_ratio_small_shift_large_argument():
    with mpmath.workdps(40):
        for x, d in [(1e4, 0.5), (3e3, -0.5), (25.0, 1e-3), (200.0, 30.0), (5.0, 2.5)]:
            ref = float(mpmath.loggamma(x + d) - mpmath.loggamma(x))
            assert log_gamma_ratio(x, d) == pytest.approx(ref, rel=1e-13)


def test_log_gamma_ratio_vectorised():
    x = np.array([3.0, 50.0, 700.0])
    out = log_gamma_ratio(x, 0.5)
    assert out.shape == (3,)
    assert out[0] == pytest.approx(math.lgamma(3.5) - math.lgamma(3.0), rel=1e-14)


def test_log_gamma_ratio_domain():
    with pytest.raises(DomainError):
        log_gamma_ratio(1.0, -2.0)


@pytest.mark.parametrize("a, b, expected", [(1, 1, 1.0), (0.5, 0.5, math.pi), (2, 3, 1 / 12)])
def test_beta_examples(a, b, expected):
    assert beta(a, b) == pytest.approx(expected, rel=1e-14)


def test_beta_large_arguments_do_not_overflow():
    ref = float(mpmath.beta(300.5, 450.25))
    assert beta(300.5, 450.25) == pytest.approx(ref, rel=1e-12)
    assert float(log_beta(300.5, 450.25)) == pytest.approx(math.log(ref), rel=1e-14)


@pytest.mark.parametrize("a, b", [(0, 1), (1, -2)])
def test_beta_domain(a, b):
    with pytest.raises(DomainError):
        beta(a, b)


@pytest.mark.parametrize("a, k, expected", [(7.3, 0, 1.0), (3, 4, 360.0), (0.5, 2, 0.75)])
def test_pochhammer_examples(a, k, expected):
    assert pochhammer(a, k) == pytest.approx(expected, rel=1e-15)


@given(st.floats(0.01, 60.0), st.integers(0, 120))
@settings(max_examples=200)
def test_pochhammer_vs_log_gamma(a, k):
    ref = math.exp(log_gamma(a + k) - log_gamma(a))
    assert pochhammer(a, k) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("s, k, expected", [(4.2, 0, 1.0), (2, 3, 4.0), (1.5, 2, 15 / 8)])
def test_gen_binom_examples(s, k, expected):
    assert gen_binom(s, k) == pytest.approx(expected, rel=1e-15)


@given(st.floats(-4.0, 15.0), st.integers(0, 60))
def test_gen_binom_matches_pochhammer(s, k):
    ref = pochhammer(s, k) / math.factorial(k)
    assert abs(gen_binom(s, k) - ref) <= 1e-14 * max(abs(ref), 1e-300)


def test_gen_binom_log_path_agrees_with_product():
    for s in (0.75, 2.5, 9.0):
        k = np.arange(60, 80)
        direct = np.array([gen_binom(s, int(j)) for j in k])
        np.testing.assert_allclose(np.exp(log_gen_binom(s, k)), direct, rtol=1e-13)
        assert gen_binom(s, 500) == pytest.approx(float(mpmath.binomial(s + 499, 500)), rel=1e-12)


def test_hyp2f1_examples():
    assert hyp2f1_truncated(0.3, 2.0, 1.7, 0.0).value == 1.0
    assert hyp2f1_truncated(1, 1, 2, 0.5).value == pytest.approx(2 * math.log(2), rel=1e-14)
    assert hyp2f1_truncated(0.5, 0.5, 1.5, 0.25).value == pytest.approx(math.pi / 3, rel=1e-14)


@pytest.mark.parametrize(
    "a, b, c, z",
    [(0.5, 1.5, 2.5, 0.9), (2.25, 2.25, 1.0, 0.81), (1.5, -0.3, 3.2, -0.7), (3.0, 4.0, 0.5, 0.3)],
)
def test_hyp2f1_tail_bound_is_honest(a, b, c, z):
    r = hyp2f1_truncated(a, b, c, z, tol=1e-6)
    ref = float(mpmath.hyp2f1(a, b, c, z))
    assert r.converged
    assert abs(r.value - ref) <= r.tail_bound + 1e-15 * abs(ref)


def test_hyp2f1_budget_exhaustion_reports_failure():
    r = hyp2f1_truncated(1.0, 1.0, 1.0, 0.999, tol=1e-15, max_terms=50)
    assert not r.converged
    assert r.terms_used == 50
    assert r.tail_bound > 0


def test_hyp2f1_rejects_bad_arguments():
    with pytest.raises(DomainError):
        hyp2f1_truncated(1, 1, 2, 1.0)
    with pytest.raises(DomainError):
        hyp2f1_truncated(1, 1, -2, 0.5)


def test_hyp2f1_partial_sums_increase_toward_gauss_value():
    a, b, c = 0.5, 0.75, 2.5
    z = 1.0 - 1e-3
    seq = [hyp2f1_truncated(a, b, c, z, max_terms=m).value for m in (1, 3, 10, 30, 100, 300, 1000)]
    assert all(x < y for x, y in zip(seq, seq[1:]))
    assert seq[-1] < gauss_2f1_unit(a, b, c)


@pytest.mark.parametrize(
    "a, b, c, expected",
    [(0.5, 0.5, 1.5, math.pi / 2), (0.5, 0.5, 2.0, 4 / math.pi), (1, 1, 3, 2.0)],
)
def test_gauss_examples(a, b, c, expected):
    assert gauss_2f1_unit(a, b, c) == pytest.approx(expected, rel=1e-14)


def test_gauss_negative_gamma_arguments_keep_sign():
    a, b, c = 1.5, 0.5, 2.3  # c - a = 0.8, c - a - b = 0.3
    assert gauss_2f1_unit(a, b, c) == pytest.approx(float(mpmath.hyp2f1(a, b, c, 1)), rel=1e-12)
    a, b, c = -0.5, 0.25, 0.1  # c - b < 0
    assert gauss_2f1_unit(a, b, c) == pytest.approx(float(mpmath.hyp2f1(a, b, c, 1)), rel=1e-12)


def test_gauss_divergent_parameters():
    with pytest.raises(DomainError):
        gauss_2f1_unit(1.0, 1.0, 2.0)
