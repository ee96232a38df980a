"""Pointwise checks of the disc Moebius substitution."""

from __future__ import annotations

from dataclasses import dataclass

from ..common import DomainError


@dataclass(frozen=True)
class MoebiusCheck:
    zeta: complex
    # |z1 - m(zeta)|, |(1 - z1 c) - (1-c^2)/(1 - zeta c)|,
    # |(1 - |z1|^2) - (1-c^2)(1-|zeta|^2)/|1 - zeta c|^2|
    residuals: tuple[float, float, float]
    jacobian_fd_residual: float


def _moebius(c: float, u: complex) -> complex:
    return (c - u) / (1 - u * c)


def moebius_identity_check(z1: complex, c: float, h: float = 1e-5) -> MoebiusCheck:
    """Verify the substitution z_1 = (c - zeta) / (1 - zeta c) at one point.

    ``jacobian_fd_residual`` is the relative difference between the real
    Jacobian determinant (1 - c^2)^2 / |1 - zeta c|^4 and a central
    finite-difference determinant of zeta -> z_1 as a map of R^2. The step
    is ``h`` times |1 - zeta c|, the scale on which the map varies near its pole.
    """
    z1 = complex(z1)
    c = float(c)
    if not abs(z1) < 1:
        raise DomainError("z1 must lie in the open unit disc")
    if not 0.0 <= c < 1.0:
        raise DomainError("c must lie in [0, 1)")
    zeta = _moebius(c, z1)
    one_c2 = 1.0 - c * c
    den = 1 - zeta * c
    res = (
        abs(z1 - _moebius(c, zeta)),
        abs((1 - z1 * c) - one_c2 / den),
        abs((1 - abs(z1) ** 2) - one_c2 * (1 - abs(zeta) ** 2) / abs(den) ** 2),
    )
    step = h * abs(den)
    dx = (_moebius(c, zeta + step) - _moebius(c, zeta - step)) / (2 * step)
    dy = (_moebius(c, zeta + 1j * step) - _moebius(c, zeta - 1j * step)) / (2 * step)
    det_fd = dx.real * dy.imag - dx.imag * dy.real
    jac = one_c2**2 / abs(den) ** 4
    return MoebiusCheck(zeta, res, abs(det_fd - jac) / jac)
