"""Reproducible point sampling on the complex unit ball.

Random streams are counter based: chunk ``i`` of a run draws from a Philox
generator keyed by ``(seed, i)``, so a chunk's samples do not depend on which
worker evaluates it. Chunk statistics are merged in chunk order, making every
estimate a pure function of ``(samples, seed, chunk_size)``.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..common import DomainError, Params

_U64 = 2**64


@dataclass(frozen=True)
class McConfig:
    samples: int = 1_000_000
    seed: int = 42
    chunk_size: int = 65_536
    workers: int = 1

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise DomainError("samples must be positive")
        if not 0 <= self.seed < _U64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if self.chunk_size < 1:
            raise DomainError("chunk_size must be positive")
        if self.workers < 1:
            raise DomainError("workers must be positive")

    def chunk_sizes(self, count: int | None = None) -> list[int]:
        total = self.samples if count is None else count
        full, rest = divmod(total, self.chunk_size)
        return [self.chunk_size] * full + ([rest] if rest else [])


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    # strictly inside (0, 1)
    return rng.random(size) * (1.0 - 2.0**-53) + 2.0**-54


def _unit_directions(rng: np.random.Generator, size: int, dim: int) -> np.ndarray:
    """Uniform points on the unit sphere of C^dim, as complex (size, dim)."""
    g = rng.standard_normal((size, 2 * dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g[:, :dim] + 1j * g[:, dim:]


def uniform_ball(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    """Lebesgue-uniform points in the unit ball of C^n (= R^2n)."""
    radius = _open_uniform(rng, size) ** (1.0 / (2 * n))
    return _unit_directions(rng, size, n) * radius[:, None]


def sample_ball(n: int, count: int, cfg: McConfig) -> Iterator[np.ndarray]:
    """Stream ``count`` uniform ball points in chunks of ``cfg.chunk_size``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    for i, size in enumerate(cfg.chunk_sizes(count)):
        yield uniform_ball(chunk_rng(cfg.seed, i), n, size)


def ball_volume(n: int) -> float:
    return math.pi**n / math.factorial(n)


@dataclass
class WeightedPoints:
    """Points w with weights such that E[h(w) weight] = int h (1-|w|^2)^alpha dv."""

    w: np.ndarray
    weight: np.ndarray
    # 1 - w_1 kept separately; it loses relative precision when formed from w
    one_minus_w1: np.ndarray


def uniform_weighted(rng: np.random.Generator, p: Params, size: int) -> WeightedPoints:
    """Uniform proposal: weight vol(B^n) (1 - |w|^2)^alpha."""
    w = uniform_ball(rng, p.n, size)
    r2 = np.sum(np.abs(w) ** 2, axis=1)
    weight = ball_volume(p.n) * (1.0 - r2) ** p.alpha
    return WeightedPoints(w, weight, 1.0 - w[:, 0])


def boundary_weighted(rng: np.random.Generator, p: Params, size: int) -> WeightedPoints:
    """Proposal concentrated at the boundary point e_1.

    w_1 = 1 - rho e^{i psi} with psi uniform on (-pi/2, pi/2) and
    rho = 2 cos(psi) v^2, v uniform on (0, 1), which covers the unit disc.
    Given w_1, the remaining coordinates w' are drawn from the density
    proportional to (R^2 - |w'|^2)^alpha on the ball of radius
    R = sqrt(1 - |w_1|^2) in C^(n-1): |w'|^2 / R^2 ~ Beta(n-1, alpha+1)
    with a uniform direction. The importance weight is

        4 pi cos(psi) v rho R^(2(alpha+n-1)) pi^(n-1) Gamma(alpha+1) / Gamma(alpha+n).

    Against integrands behaving like |1 - w_1|^-(n+alpha+1) times a factor
    of order |1 - w_1| + |w_2| this weight keeps the estimator bounded; under
    uniform sampling the same estimator has infinite variance.
    """
    d = p.n - 1
    psi = math.pi * (_open_uniform(rng, size) - 0.5)
    v = _open_uniform(rng, size)
    cos_psi = np.cos(psi)
    rho = 2.0 * cos_psi * v * v
    one_minus_w1 = rho * np.exp(1j * psi)
    w1 = 1.0 - one_minus_w1
    # 1 - |w_1|^2 = rho (2 cos psi - rho), written without cancellation
    R2 = rho * 2.0 * cos_psi * (1.0 - v * v)
    frac = rng.beta(d, p.alpha + 1.0, size)
    wp = _unit_directions(rng, size, d) * np.sqrt(R2 * frac)[:, None]
    w = np.concatenate((w1[:, None], wp), axis=1)
    log_k = d * math.log(math.pi) + math.lgamma(p.alpha + 1) - math.lgamma(p.alpha + p.n)
    log_weight = (
        math.log(4 * math.pi)
        + log_k
        + np.log(cos_psi)
        + np.log(v)
        + np.log(rho)
        + (p.alpha + d) * np.log(R2)
    )
    return WeightedPoints(w, np.exp(log_weight), one_minus_w1)


PROPOSALS: dict[str, Callable[[np.random.Generator, Params, int], WeightedPoints]] = {
    "boundary": boundary_weighted,
    "uniform": uniform_weighted,
}


@dataclass(frozen=True)
class RunningStats:
    count: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def of(cls, x: np.ndarray) -> RunningStats:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        mean = x.mean(axis=1)
        return cls(x.shape[1], mean, ((x - mean[:, None]) ** 2).sum(axis=1))

    def merge(self, other: RunningStats) -> RunningStats:
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta**2 * (self.count * other.count / n)
        return RunningStats(n, mean, m2)

    @property
    def stderr(self) -> np.ndarray:
        if self.count < 2:
            return np.full_like(self.mean, np.inf)
        return np.sqrt(self.m2 / (self.count - 1) / self.count)


def run_chunks(
    estimator: Callable[[np.random.Generator, int], np.ndarray],
    cfg: McConfig,
) -> RunningStats:
    """Evaluate ``estimator(rng, size)`` on every chunk and merge in chunk order.

    ``estimator`` returns an array of shape (k, size) (or (size,)) of
    per-sample values for k estimators sharing the same stream.
    """
    sizes = cfg.chunk_sizes()

    def one(i: int) -> RunningStats:
        return RunningStats.of(estimator(chunk_rng(cfg.seed, i), sizes[i]))

    if cfg.workers == 1 or len(sizes) == 1:
        parts = [one(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return total
