"""The invariant suite behind ``blochnorm validate``.

Every check is deterministic given (Params, McConfig): random test points
come from a generator seeded with ``cfg.seed`` and Monte Carlo runs use the
chunked counter-based streams, so reports are byte-stable.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass

import numpy as np

from . import norm_constants as nc
from . import series_repr as sr
from . import special_fn as sf
from .common import Params
from .quadrature_oracle import (
    McConfig,
    circle_parseval,
    fubini_chain_check,
    l_from_quad,
    mc_l_full,
    moebius_identity_check,
    orth_invariance_check,
    radial_beta,
    sample_ball,
)

HALF_PI = math.pi / 2
MC_T_POINTS = (0.0, 0.4, math.pi / 4, 1.2, HALF_PI)
CHAIN_GRID = [(n, a) for n in (2, 3, 4, 5, 8) for a in (-0.5, 0.0, 1.5, 7.25)]
# rounding slack for comparisons whose stated tolerance is a pure tail bound
_ROUND = 16 * np.finfo(float).eps


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def _fmt(x: float) -> str:
    return f"{x:.3e}"


class _Suite:
    def __init__(self, p: Params, cfg: McConfig, tol: float):
        self.p = p
        self.cfg = cfg
        self.tol = tol
        self.rng = np.random.default_rng(cfg.seed)

    def value_at(self, t: float) -> float:
        if t == 0.0:
            return sr.l_limit_zero(self.p)
        return sr.l_series(self.p, t, self.tol).value

    # -- special_fn ---------------------------------------------------------

    def log_gamma_recurrence(self) -> Check:
        xs = self.rng.uniform(0.1, 500.0, 1000)
        # exp(lg(x+1)) / (x exp(lg(x))) - 1, formed in log space to avoid overflow
        worst = max(abs(math.expm1(sf.log_gamma(x + 1) - sf.log_gamma(x) - math.log(x))) for x in xs)
        return Check("special_fn.log_gamma_recurrence", worst <= 1e-12, f"max_rel={_fmt(worst)}")

    def pochhammer_vs_log_gamma(self) -> Check:
        worst = 0.0
        for a in self.rng.uniform(0.05, 50.0, 100):
            for k in range(0, 60, 3):
                ref = math.exp(sf.log_gamma(a + k) - sf.log_gamma(a))
                worst = max(worst, _rel(sf.pochhammer(a, k), ref))
        return Check("special_fn.pochhammer_vs_log_gamma", worst <= 1e-12, f"max_rel={_fmt(worst)}")

    def gen_binom_vs_pochhammer(self) -> Check:
        worst = 0.0
        for s in self.rng.uniform(-3.0, 12.0, 50):
            for k in range(0, 40):
                ref = sf.pochhammer(s, k) / math.factorial(k)
                got = sf.gen_binom(s, k)
                worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
        return Check("special_fn.gen_binom_vs_pochhammer", worst <= 1e-14, f"max_rel={_fmt(worst)}")

    def hyp2f1_known_values(self) -> Check:
        cases = (
            ((1.0, 1.0, 2.0, 0.5), 2 * math.log(2)),
            ((0.5, 0.5, 1.5, 0.25), math.pi / 3),
            ((0.7, 1.3, 2.1, 0.0), 1.0),
        )
        worst = max(_rel(sf.hyp2f1_truncated(*args).value, ref) for args, ref in cases)
        return Check("special_fn.hyp2f1_known_values", worst <= 1e-13, f"max_rel={_fmt(worst)}")

    def hyp2f1_monotone_to_gauss(self) -> Check:
        a, b, c = 0.5, 0.75, 2.5
        z = 1.0 - 1e-3
        target = sf.gauss_2f1_unit(a, b, c)
        partials = [sf.hyp2f1_truncated(a, b, c, z, max_terms=m).value for m in (1, 4, 16, 64, 256, 1024, 4096)]
        full = sf.hyp2f1_truncated(a, b, c, z).value
        seq = partials + [full]
        ok = all(x < y for x, y in zip(seq, seq[1:])) and full < target
        return Check(
            "special_fn.hyp2f1_monotone_to_gauss",
            ok,
            f"partial={full:.12g} gauss={target:.12g}",
        )

    def gauss_known_values(self) -> Check:
        cases = (((0.5, 0.5, 1.5), HALF_PI), ((0.5, 0.5, 2.0), 4 / math.pi), ((1.0, 1.0, 3.0), 2.0))
        worst = max(_rel(sf.gauss_2f1_unit(*args), ref) for args, ref in cases)
        return Check("special_fn.gauss_known_values", worst <= 1e-14, f"max_rel={_fmt(worst)}")

    # -- series_repr --------------------------------------------------------

    def coeff_recurrence(self) -> Check:
        worst = max(_rel(sr.coeff_a(m + 1), sr.coeff_a(m) * sr.coeff_a_ratio(m)) for m in range(501))
        a = sr._coeffs(10_001)
        shape = bool(np.all(np.diff(a) < 0) and np.all(a > 1))
        return Check(
            "series_repr.coeff_recurrence",
            worst <= 1e-13 and shape,
            f"max_rel={_fmt(worst)} decreasing_above_one={shape}",
        )

    def abel_rearrangement(self) -> Check:
        worst = 0.0
        ok = True
        for x in (0.1, 0.5, 0.9):
            d = sr.phi_eval(self.p, x, self.tol, form="direct")
            b = sr.phi_eval(self.p, x, self.tol, form="abel")
            gap = abs(d.value - b.value)
            ok &= gap <= d.tail_bound + b.tail_bound + _ROUND * abs(d.value)
            worst = max(worst, gap / abs(d.value))
        return Check("series_repr.abel_rearrangement", ok, f"max_rel_gap={_fmt(worst)}")

    def phi_bounded_and_decreasing(self) -> Check:
        xs = np.linspace(0.0, 0.99, 100)
        res = [sr.phi_eval(self.p, float(x), self.tol) for x in xs]
        vals = np.array([r.value for r in res])
        bnds = np.array([r.tail_bound for r in res])
        bounded = bool(np.all(vals <= vals[0] + bnds))
        margins = -np.diff(vals) - (bnds[1:] + bnds[:-1])
        decreasing = bool(np.all(margins > 0))
        return Check(
            "series_repr.phi_bounded_and_decreasing",
            bounded and decreasing,
            f"bounded={bounded} min_drop={_fmt(float(margins.min()))}",
        )

    def ksum_gauss(self) -> Check:
        worst_direct = worst_gauss = 0.0
        s1 = (self.p.s + 1) / 2
        for m in range(21):
            closed = sr.ksum_closed(self.p, m)
            worst_direct = max(worst_direct, _rel(sr.ksum_direct(self.p, m).value, closed))
            c = self.p.s + m + 1.5
            via_gauss = sf.gauss_2f1_unit(s1, s1, c) / math.exp(sf.log_gamma(c))
            worst_gauss = max(worst_gauss, _rel(via_gauss, closed))
        return Check(
            "series_repr.ksum_gauss",
            worst_direct <= 1e-8 and worst_gauss <= 1e-10,
            f"direct_rel={_fmt(worst_direct)} gauss_rel={_fmt(worst_gauss)}",
        )

    def endpoint_exact(self) -> Check:
        top = sr.l_series(self.p, HALF_PI, self.tol).value
        C = sr.l_limit_zero(self.p)
        r1 = _rel(top, HALF_PI * math.exp(nc.log_C_alpha(self.p)))
        r2 = _rel(top / C, HALF_PI)
        return Check("series_repr.endpoint_exact", max(r1, r2) <= 1e-12, f"rel={_fmt(max(r1, r2))}")

    def abel_limit(self) -> Check:
        r = sr.phi_eval(self.p, 1.0 - 1e-6, self.tol, form="abel")
        normalized = r.value / math.exp(sr.log_phi_prefactor(self.p))
        dev = abs(normalized - 1.0)
        return Check("series_repr.abel_limit", dev <= 1e-3, f"normalized={normalized:.9f}")

    def scan(self) -> Check:
        res = sr.scan_monotone(self.p, 1001, tol=self.tol)
        C = sr.l_limit_zero(self.p)
        rel = _rel(res.max_value, HALF_PI * C)
        ok = res.is_increasing and res.argmax == HALF_PI and rel <= 1e-10
        self.scan_max = res.max_value
        return Check(
            "series_repr.scan_monotone",
            ok,
            f"increasing={res.is_increasing} argmax={res.argmax:.15g} max_rel={_fmt(rel)}",
        )

    def double_series(self) -> Check:
        worst = 0.0
        for t in np.linspace(0.1, HALF_PI, 9):
            d = sr.l_double_series(self.p, float(t))
            worst = max(worst, _rel(d.value, self.value_at(float(t))))
        return Check("series_repr.double_vs_single", worst <= 1e-6, f"max_rel={_fmt(worst)}")

    # -- quadrature_oracle --------------------------------------------------

    def parseval(self) -> Check:
        worst = 0.0
        for s in (2.0, 3.5, 5.0, 8.0):
            for q in (0.0, 0.3, 0.7, 0.95):
                r = circle_parseval(s, q)
                worst = max(worst, _rel(r.closed_series, r.direct_quadrature))
        return Check("quadrature.circle_parseval", worst <= 1e-8, f"max_rel={_fmt(worst)}")

    def radial(self) -> Check:
        worst = 0.0
        for k in range(11):
            for s in (-0.9, -0.5, 0.0, 0.5, 1.0, 3.7, 10.0, self.p.s - 2):
                r = radial_beta(k, s)
                worst = max(worst, _rel(r.quadrature, r.closed))
        return Check("quadrature.radial_beta", worst <= 1e-10, f"max_rel={_fmt(worst)}")

    def moebius(self) -> Check:
        radius = np.sqrt(self.rng.uniform(0.0, 1.0, 1000)) * (1 - 1e-9)
        angle = self.rng.uniform(0.0, 2 * math.pi, 1000)
        cs = self.rng.uniform(0.0, 1.0, 1000)
        worst_res = worst_jac = 0.0
        for i, (rad, ang, c) in enumerate(zip(radius, angle, cs)):
            r = moebius_identity_check(complex(rad * math.cos(ang), rad * math.sin(ang)), float(c))
            worst_res = max(worst_res, *r.residuals)
            if i < 100:
                worst_jac = max(worst_jac, r.jacobian_fd_residual)
        return Check(
            "quadrature.moebius_identities",
            worst_res < 1e-12 and worst_jac < 1e-6,
            f"max_residual={_fmt(worst_res)} max_jacobian_fd={_fmt(worst_jac)}",
        )

    def quad_vs_series(self) -> Check:
        worst = 0.0
        for t in (0.3, 0.8, 1.2, HALF_PI):
            worst = max(worst, _rel(l_from_quad(self.p, t).value, self.value_at(t)))
        return Check("quadrature.quad2d_vs_series", worst <= 1e-4, f"max_rel={_fmt(worst)}")

    def ball_sampler(self) -> Check:
        count = min(self.cfg.samples, 1_000_000)
        chunks = [np.sum(np.abs(z) ** 2, axis=1) for z in sample_ball(self.p.n, count, self.cfg)]
        r2 = np.concatenate(chunks)
        inside = bool(np.all(r2 < 1.0))
        expected = self.p.n / (self.p.n + 1)
        stderr = r2.std(ddof=1) / math.sqrt(r2.size)
        z = abs(r2.mean() - expected) / stderr
        return Check(
            "quadrature.sample_ball_moment",
            inside and z <= 3.0,
            f"mean={r2.mean():.6f} expected={expected:.6f} z={z:.2f}",
        )

    def mc_points(self) -> Iterator[Check]:
        for t in MC_T_POINTS:
            mc = mc_l_full(self.p, t, self.cfg)
            ref = self.value_at(t)
            z = abs(mc.value - ref) / mc.stderr
            yield Check(
                f"quadrature.mc_vs_series[t={t:.6g}]",
                z <= 3.0,
                f"mc={mc.value:.8g} series={ref:.8g} z={z:.2f}",
            )

    def orthogonal(self) -> Iterator[Check]:
        res = orth_invariance_check(self.p, 0.6, self.cfg)
        mc = mc_l_full(self.p, 0.6, self.cfg)
        structural = _rel(mc.value, (self.p.s + 1) * res.lhs.value)
        yield Check(
            "quadrature.orth_invariance[t=0.6]",
            res.passed and structural <= 1e-12,
            f"lhs={res.lhs.value:.8g} rhs={res.rhs.value:.8g} flipped={res.rhs_flipped.value:.8g}"
            f" structural_rel={_fmt(structural)}",
        )
        zero = orth_invariance_check(self.p, 0.0, self.cfg)
        diff = abs(zero.lhs.value - zero.rhs.value)
        yield Check("quadrature.orth_invariance[t=0]", diff == 0.0, f"diff={_fmt(diff)}")

    def fubini(self) -> Check:
        r = fubini_chain_check(self.p, 1.0, self.cfg)
        return Check(
            "quadrature.fubini_chain[t=1]",
            r.passed,
            f"mc={r.mc_value:.8g} reduced={r.reduced_value:.8g} stderr={_fmt(r.mc_stderr)}",
        )

    # -- norm_constants -----------------------------------------------------

    def chain(self) -> Check:
        grid = CHAIN_GRID + [(self.p.n, self.p.alpha)]
        worst = max(nc.chain_consistency(Params(n, a)) for n, a in grid)
        other = nc.chain_consistency(self.p, phi_gamma_shift=+1)
        return Check(
            "norm_constants.chain_consistency",
            worst < 1e-12,
            f"max_residual={_fmt(worst)} alternative_prefactor_residual={_fmt(other)}",
        )

    def bounds(self) -> Check:
        k = nc.compute_constants(self.p)
        inside = nc.bound_check(self.p, self.scan_max)
        rejects = not nc.bound_check(self.p, 1.9 * k.C_alpha)
        at_low = _rel(self.scan_max, k.bound_low)
        return Check(
            "norm_constants.bound_check",
            inside and rejects and at_low <= 1e-10,
            f"max_over_C={self.scan_max / k.C_alpha:.12f} lower_endpoint_rel={_fmt(at_low)}",
        )

    def depends_on_sum(self) -> Check:
        pairs = [((2, 1.0), (3, 0.0)), ((2, 2.5), (4, 0.5)), ((3, -0.5), (2, 0.5))]
        if self.p.alpha - 1 > -1:
            pairs.append(((self.p.n, self.p.alpha), (self.p.n + 1, self.p.alpha - 1)))
        worst = 0.0
        for u, v in pairs:
            a, b = nc.compute_constants(Params(*u)), nc.compute_constants(Params(*v))
            worst = max(worst, _rel(a.C_alpha, b.C_alpha), _rel(a.C_tilde, b.C_tilde), _rel(a.bloch_norm, b.bloch_norm))
        return Check("norm_constants.depends_on_sum", worst <= 1e-12, f"max_rel={_fmt(worst)}")

    def checks(self) -> Iterator[Check]:
        single: list[Callable[[], Check]] = [
            self.log_gamma_recurrence,
            self.pochhammer_vs_log_gamma,
            self.gen_binom_vs_pochhammer,
            self.hyp2f1_known_values,
            self.hyp2f1_monotone_to_gauss,
            self.gauss_known_values,
            self.coeff_recurrence,
            self.abel_rearrangement,
            self.phi_bounded_and_decreasing,
            self.ksum_gauss,
            self.endpoint_exact,
            self.abel_limit,
            self.scan,
            self.double_series,
            self.parseval,
            self.radial,
            self.moebius,
            self.quad_vs_series,
            self.ball_sampler,
        ]
        for fn in single:
            yield fn()
        yield from self.mc_points()
        yield from self.orthogonal()
        yield self.fubini()
        yield self.chain()
        yield self.bounds()
        yield self.depends_on_sum()


def run_validation(p: Params, cfg: McConfig | None = None, tol: float = 1e-10) -> list[Check]:
    """Run every invariant check for ``p`` in a fixed order."""
    return list(_Suite(p, cfg or McConfig(), tol).checks())
