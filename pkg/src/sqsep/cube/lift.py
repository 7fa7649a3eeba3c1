"""Lifting a bias measure on [-1, 1] to a distribution on {-1, 1}^d.

A point is drawn by sampling a bias p from the base measure and then d
independent +-1 bits with mean p. The result is exchangeable: its pmf and
every Fourier coefficient depend only on the number j of +1 coordinates
(respectively on |S|), so all exact quantities are computed over the d + 1
count classes instead of the 2^d points.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Optional, Union
import logging
import math

import mpmath
import numpy as np

from sqsep.cube.distances import (
    DiscreteDistribution,
    count_domain,
    cube_domain,
    cube_points,
)
from sqsep.errors import (
    BiasOutOfRange,
    DomainMismatch,
    EnumerationBudgetExceeded,
    ParameterError,
)
from sqsep.moments.measures import AtomicMeasure, HybridMeasure
from sqsep.moments.polynomials import extended_precision


_logger = logging.getLogger("sqsep.console")

MAX_ENUMERATION_DIM = 14

BaseMeasure = Union[AtomicMeasure, HybridMeasure]


def _krawtchouk(d: int, m: int, j: int) -> int:
    """Sum of chi_S(x) over |S| = m for a point x with j coordinates equal to +1."""
    return sum(
        (-1) ** t * math.comb(d - j, t) * math.comb(j, m - t)
        for t in range(max(0, m - j), min(m, d - j) + 1)
    )


@extended_precision
def _point_weights(d: int, base_moments) -> np.ndarray:
    scale = mpmath.mpf(2) ** -d
    weights = []
    for j in range(d + 1):
        total = mpmath.mpf(0)
        for i in range(d + 1):
            coeff = _krawtchouk(d, i, j)
            if coeff:
                total += coeff * base_moments[i]
        weights.append(total * scale)
    return np.array([max(float(w), 0.0) for w in weights])


@dataclass(frozen=True)
class ProductMixtureCube:
    """Lift of ``base`` to {-1, 1}^d, optionally conditioned on sum(x)/d >= threshold.

    Attributes:
        base: Bias measure supported in [-1, 1]
        d: Dimension
        threshold: Majority threshold of the conditioning event, None for none
    """

    base: BaseMeasure
    d: int
    threshold: Optional[float] = None

    def __post_init__(self):
        if self.d < 1:
            raise ParameterError(f"Cube dimension must be positive, got {self.d}")
        lo, hi = self.base.support_bounds()
        if lo < -1 - 1e-15 or hi > 1 + 1e-15:
            raise BiasOutOfRange(f"Bias support [{lo:.6g}, {hi:.6g}] leaves [-1, 1]")

    @cached_property
    def base_moments(self):
        return self.base.moments(self.d)

    @cached_property
    def min_count(self) -> int:
        """Smallest number of +1 coordinates allowed by the conditioning."""
        if self.threshold is None:
            return 0
        needed = math.ceil(self.d * (1 + self.threshold) / 2 - 1e-12)
        return min(max(needed, 0), self.d + 1)

    @cached_property
    def point_weights(self) -> np.ndarray:
        """Unconditioned pmf of a single point with j coordinates equal to +1.

        E[((1+p)/2)^j ((1-p)/2)^(d-j)] expanded in powers of p and integrated
        against the exact base moments.
        """
        return _point_weights(self.d, self.base_moments)

    @cached_property
    def _unconditioned_counts(self) -> np.ndarray:
        combs = np.array([math.comb(self.d, j) for j in range(self.d + 1)], dtype=float)
        return combs * self.point_weights

    @cached_property
    def conditioned_mass(self) -> float:
        """Mass removed by the conditioning event (0 without conditioning)."""
        counts = self._unconditioned_counts
        return float(max(0.0, counts[: self.min_count].sum() / counts.sum()))

    @cached_property
    def count_pmf(self) -> np.ndarray:
        """Law of the number of +1 coordinates, after conditioning."""
        counts = self._unconditioned_counts.copy()
        counts[: self.min_count] = 0.0
        total = counts.sum()
        if total <= 0:
            raise ParameterError(
                f"Conditioning on sum(x)/d >= {self.threshold} leaves no mass at d={self.d}"
            )
        return counts / total

    @cached_property
    def fourier_by_cardinality(self) -> np.ndarray:
        """Fourier coefficient of any S with |S| = m, for m = 0..d.

        Unconditioned lifts use the identity E[chi_S(x)] = E[p^|S|]; conditioned
        lifts sum the Krawtchouk values over the count classes.
        """
        d = self.d
        if self.threshold is None:
            return np.array([float(m) for m in self.base_moments])
        coeffs = np.empty(d + 1)
        for m in range(d + 1):
            coeffs[m] = sum(
                self.count_pmf[j] * _krawtchouk(d, m, j) for j in range(d + 1)
            ) / math.comb(d, m)
        coeffs[0] = 1.0
        return coeffs

    def count_distribution(self) -> DiscreteDistribution:
        return DiscreteDistribution(self.count_pmf, count_domain(self.d))

    def pmf(self, x: np.ndarray) -> float:
        """Exact probability of the point ``x``."""
        x = np.asarray(x)
        if x.shape != (self.d,):
            raise DomainMismatch(f"Expected a point of dimension {self.d}")
        j = int((x > 0).sum())
        return float(self.count_pmf[j] / math.comb(self.d, j))

    def distribution(self, max_dim: int = MAX_ENUMERATION_DIM) -> DiscreteDistribution:
        """Full pmf over the 2^d points in bit-pattern order.

        Raises:
            EnumerationBudgetExceeded: If d exceeds ``max_dim``
        """
        if self.d > max_dim:
            raise EnumerationBudgetExceeded(
                f"Exact pmf needs d <= {max_dim}, got d={self.d}"
            )
        points = cube_points(self.d)
        counts = (points > 0).sum(axis=1)
        combs = np.array([math.comb(self.d, j) for j in range(self.d + 1)], dtype=float)
        return DiscreteDistribution(self.count_pmf[counts] / combs[counts], cube_domain(self.d))

    def fourier_coeff(self, subset: Iterable[int]) -> float:
        subset = set(subset)
        if any(not 0 <= i < self.d for i in subset):
            raise DomainMismatch(f"Subset {sorted(subset)} is not contained in [{self.d}]")
        return float(self.fourier_by_cardinality[len(subset)])

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` points as an int8 array of shape (n, d).

        Conditioned lifts use rejection on the unconditioned sampler.
        """
        if self.threshold is None:
            return self._draw(rng, n)
        accept = max(1.0 - self.conditioned_mass, 1e-6)
        kept = []
        remaining = n
        for _ in range(10_000):
            if remaining <= 0:
                break
            batch = self._draw(rng, int(math.ceil(remaining / accept * 1.1)) + 16)
            batch = batch[(batch > 0).sum(axis=1) >= self.min_count][:remaining]
            kept.append(batch)
            remaining -= len(batch)
        else:
            raise RuntimeError("Rejection sampler did not fill the request")
        return np.concatenate(kept) if kept else np.empty((0, self.d), dtype=np.int8)

    def _draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        p = np.asarray(self.base.sample(rng, n), dtype=float)
        bits = rng.random((n, self.d)) < ((1 + p) / 2)[:, None]
        return np.where(bits, 1, -1).astype(np.int8)

    def as_dict(self) -> Dict[str, object]:
        return {
            "d": self.d,
            "threshold": self.threshold,
            "conditioned_mass": self.conditioned_mass,
            "count_pmf": self.count_pmf.tolist(),
        }


def lift(base: BaseMeasure, d: int, threshold: Optional[float] = None) -> ProductMixtureCube:
    """Lift a bias measure to {-1, 1}^d.

    Raises:
        BiasOutOfRange: If the base puts mass outside [-1, 1]
    """
    return ProductMixtureCube(base, d, threshold)


def fourier_gap(
    p1: ProductMixtureCube, pm1: ProductMixtureCube, max_card: Optional[int] = None
) -> float:
    """max over |S| <= max_card of |P1^(S) - P-1^(S)|.

    Raises:
        DomainMismatch: If the dimensions differ
    """
    if p1.d != pm1.d:
        raise DomainMismatch(f"Dimensions differ: {p1.d} vs {pm1.d}")
    max_card = p1.d if max_card is None else min(max_card, p1.d)
    gaps = np.abs(p1.fourier_by_cardinality - pm1.fourier_by_cardinality)
    return float(gaps[: max_card + 1].max())


def chernoff_bound(d: int, gamma_tilde: float, threshold: Optional[float] = None) -> float:
    """Bound exp(-d (gamma~ - t)^2 / 2) on the mass removed by conditioning at t.

    Every bias of P' is at least gamma~, so a count below d (1 + t) / 2 needs
    a deviation of d (gamma~ - t) / 2. The default t = gamma~/2 gives
    exp(-d gamma~^2 / 8); thresholds at or above gamma~ get the trivial bound 1.
    """
    threshold = gamma_tilde / 2 if threshold is None else threshold
    if threshold >= gamma_tilde:
        return 1.0
    return math.exp(-d * (gamma_tilde - threshold) ** 2 / 2)
