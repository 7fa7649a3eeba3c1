"""Finite distributions, stochastic channels and exact total variation.

Cube-domain pmfs index points by bit pattern: bit i of the index is set
exactly when x_i = -1, so negating a point flips every bit and negating a
distribution reverses its pmf array. Count-domain pmfs index the number of
+1 coordinates, and negation reverses them as well.
"""

from dataclasses import dataclass
from typing import Hashable, Tuple

import numpy as np
from scipy.linalg import hadamard

from sqsep.errors import DomainMismatch, EnumerationBudgetExceeded, RowNotStochastic


MAX_CUBE_BITS = 20
MAX_FOURIER_BITS = 11
STOCHASTIC_TOLERANCE = 1e-12


def cube_domain(n: int) -> Tuple[str, int]:
    return ("cube", int(n))


def count_domain(n: int) -> Tuple[str, int]:
    return ("count", int(n))


def cube_points(n: int, max_bits: int = MAX_CUBE_BITS) -> np.ndarray:
    """All points of {-1, 1}^n as an int8 array of shape (2^n, n), in index order.

    Raises:
        EnumerationBudgetExceeded: If n exceeds ``max_bits``
    """
    if n > max_bits:
        raise EnumerationBudgetExceeded(
            f"Enumerating {{-1,1}}^{n} exceeds the 2^{max_bits} point budget"
        )
    index = np.arange(2**n, dtype=np.int64)
    bits = (index[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int8)


def point_index(x: np.ndarray) -> np.ndarray:
    """Inverse of ``cube_points``: bit pattern index of each row of ``x``."""
    x = np.atleast_2d(x)
    bits = (x < 0).astype(np.int64)
    return bits @ (1 << np.arange(x.shape[1], dtype=np.int64))


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability mass function over a finite, labelled domain."""

    pmf: np.ndarray
    domain: Hashable

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=float)
        if pmf.ndim != 1:
            raise ValueError("pmf must be one-dimensional")
        if np.any(pmf < -STOCHASTIC_TOLERANCE) or abs(pmf.sum() - 1) > 1e-9:
            raise ValueError(f"pmf is not a probability vector (sum {pmf.sum():.12g})")
        object.__setattr__(self, "pmf", pmf)

    def __len__(self) -> int:
        return len(self.pmf)

    def negate(self) -> "DiscreteDistribution":
        """Law of -x for cube- and count-domain distributions."""
        kind = self.domain[0] if isinstance(self.domain, tuple) else None
        if kind not in ("cube", "count"):
            raise DomainMismatch(f"Negation undefined on domain {self.domain!r}")
        return DiscreteDistribution(self.pmf[::-1].copy(), self.domain)

    def fourier(self) -> np.ndarray:
        """All Fourier coefficients E[chi_S(x)], indexed by the bitmask of S."""
        kind, n = self.domain
        if kind != "cube":
            raise DomainMismatch("Fourier coefficients need a cube domain")
        return walsh_hadamard(self.pmf, n)

    def expect(self, values: np.ndarray) -> float:
        return float(self.pmf @ np.asarray(values, dtype=float))


def walsh_hadamard(values: np.ndarray, n: int) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform sum_x values[x] * chi_S(x).

    The Sylvester matrix entry (i, j) is (-1)^popcount(i & j), which is
    chi_S(x) under the bit-pattern indexing.

    Raises:
        EnumerationBudgetExceeded: If n exceeds MAX_FOURIER_BITS
    """
    if n > MAX_FOURIER_BITS:
        raise EnumerationBudgetExceeded(
            f"Fourier transform on {n} bits exceeds the 2^{MAX_FOURIER_BITS} budget"
        )
    values = np.asarray(values, dtype=float)
    if len(values) != 2**n:
        raise ValueError(f"Expected {2**n} values, got {len(values)}")
    return hadamard(2**n, dtype=float) @ values


def tv_exact(first: DiscreteDistribution, second: DiscreteDistribution) -> float:
    """Total variation distance 1/2 sum |p - q| over a common domain.

    Raises:
        DomainMismatch: If the domains differ
    """
    if first.domain != second.domain or len(first) != len(second):
        raise DomainMismatch(f"Cannot compare {first.domain!r} with {second.domain!r}")
    return float(min(1.0, 0.5 * np.abs(first.pmf - second.pmf).sum()))


def product(first: DiscreteDistribution, second: DiscreteDistribution) -> DiscreteDistribution:
    """Independent product. The first factor occupies the low-order index digits,
    so the product of two cube distributions is the cube distribution of the
    concatenated point.
    """
    pmf = np.outer(second.pmf, first.pmf).ravel()
    if (
        isinstance(first.domain, tuple)
        and isinstance(second.domain, tuple)
        and first.domain[0] == second.domain[0] == "cube"
    ):
        domain = cube_domain(first.domain[1] + second.domain[1])
    else:
        domain = ("product", first.domain, second.domain)
    return DiscreteDistribution(pmf / pmf.sum(), domain)


@dataclass(frozen=True)
class Channel:
    """Random function between finite domains as a row-stochastic matrix."""

    matrix: np.ndarray
    input_domain: Hashable
    output_domain: Hashable

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.ndim != 2:
            raise RowNotStochastic("Channel matrix must be two-dimensional")
        if np.any(matrix < -STOCHASTIC_TOLERANCE):
            raise RowNotStochastic("Channel matrix has negative entries")
        deviation = np.abs(matrix.sum(axis=1) - 1)
        if np.any(deviation > 1e-9):
            row = int(np.argmax(deviation))
            raise RowNotStochastic(f"Row {row} sums to {matrix[row].sum():.12g}")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, domain: Hashable, size: int) -> "Channel":
        return cls(np.eye(size), domain, domain)

    @classmethod
    def constant(cls, domain: Hashable, size: int, output: int = 0) -> "Channel":
        matrix = np.zeros((size, size))
        matrix[:, output] = 1.0
        return cls(matrix, domain, domain)

    @classmethod
    def merge(cls, domain: Hashable, size: int, source: int, target: int) -> "Channel":
        """Deterministic coarsening that sends ``source`` to ``target``."""
        matrix = np.eye(size)
        matrix[source] = 0.0
        matrix[source, target] = 1.0
        return cls(matrix, domain, domain)

    @classmethod
    def random(cls, rng: np.random.Generator, domain: Hashable, size: int) -> "Channel":
        matrix = rng.dirichlet(np.full(size, 0.5), size=size)
        return cls(matrix, domain, domain)


def push_forward(dist: DiscreteDistribution, channel: Channel) -> DiscreteDistribution:
    """Law of channel(x) for x ~ dist.

    Raises:
        DomainMismatch: If the channel does not accept the distribution's domain
    """
    if channel.input_domain != dist.domain or channel.matrix.shape[0] != len(dist):
        raise DomainMismatch(
            f"Channel expects {channel.input_domain!r}, got {dist.domain!r}"
        )
    pmf = np.clip(dist.pmf @ channel.matrix, 0.0, None)
    return DiscreteDistribution(pmf / pmf.sum(), channel.output_domain)
