"""Parameter and result containers shared by every module."""

from __future__ import annotations

import math
from dataclasses import dataclass


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is valid."""


class ConvergenceError(ArithmeticError):
    """A truncated series or quadrature did not reach the requested tolerance."""


@dataclass(frozen=True)
class Params:
    """Dimension ``n`` of the ball and weight exponent ``alpha``.

    Every formula in the package needs ``n >= 2`` and ``alpha > -1``.
    """

    n: int
    alpha: float

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise DomainError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "alpha", float(self.alpha))
        if self.n < 2:
            raise DomainError("n must be >= 2")
        if not math.isfinite(self.alpha) or self.alpha <= -1.0:
            raise DomainError("alpha must be > -1")

    @property
    def s(self) -> float:
        """n + alpha; most constants depend on the pair only through this sum."""
        return self.n + self.alpha


@dataclass(frozen=True)
class SeriesResult:
    """Truncated series value.

    ``tail_bound`` bounds ``|true value - value|``. When ``converged`` is
    False the requested tolerance was not met within the term budget and
    ``value``/``tail_bound`` hold the best partial result.
    """

    value: float
    terms_used: int
    tail_bound: float
    converged: bool = True


@dataclass(frozen=True)
class QuadResult:
    """Result of an integration oracle.

    ``error_estimate`` is the quadrature error estimate for deterministic
    rules and ``3 * stderr`` for Monte Carlo, where ``stderr`` is the sample
    standard error (zero for deterministic rules).
    """

    value: float
    error_estimate: float
    evals: int
    stderr: float = 0.0
    converged: bool = True
