"""Independent integration oracles for the integral representations of l(t)."""

from .deterministic import (
    CircleParseval,
    RadialBeta,
    circle_parseval,
    disk_kernel_2f1,
    l_from_quad,
    quad_I_2d,
    radial_beta,
    radial_moment,
)
from .identities import MoebiusCheck, moebius_identity_check
from .montecarlo import (
    FubiniCheck,
    OrthInvariance,
    fubini_chain_check,
    mc_l_full,
    orth_invariance_check,
)
from .sampling import McConfig, chunk_rng, sample_ball, uniform_ball

__all__ = [
    "CircleParseval",
    "FubiniCheck",
    "McConfig",
    "MoebiusCheck",
    "OrthInvariance",
    "RadialBeta",
    "chunk_rng",
    "circle_parseval",
    "disk_kernel_2f1",
    "fubini_chain_check",
    "l_from_quad",
    "mc_l_full",
    "moebius_identity_check",
    "orth_invariance_check",
    "quad_I_2d",
    "radial_beta",
    "radial_moment",
    "sample_ball",
    "uniform_ball",
]
