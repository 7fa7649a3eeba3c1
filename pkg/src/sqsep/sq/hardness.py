"""Hardness experiments: how far a query can separate D_{a,0} from D_{a,1}.

For a query h the per-a gap is h(D_{a,0}, f_{a,0}) - h(D_{a,1}, f_{a,1}).
Averaged over a uniform translation a its square is a Fourier sum weighted
by the coefficient gaps of the two lifts, so few translations let any fixed
query tell the pair apart. Gaps are computed for every a at once by
Walsh-Hadamard correlation when the joint cube is small, and per sampled a
from the label-parity expansion otherwise.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Union
import logging
import math

import numpy as np

from sqsep.cube import (
    DiscreteDistribution,
    HardInstance,
    ProductMixtureCube,
    cube_points,
    fourier_gap,
    product,
    walsh_hadamard,
)
from sqsep.cube.distances import MAX_FOURIER_BITS
from sqsep.errors import CheckFailed, DomainMismatch, EnumerationBudgetExceeded
from sqsep.sq.oracle import analytic_value
from sqsep.sq.queries import StatQuery, restrict_label


_logger = logging.getLogger("sqsep.console")

PointFunction = Callable[[np.ndarray], np.ndarray]


def _joint_laws(p1: ProductMixtureCube, pm1: ProductMixtureCube):
    """Laws of u = y x / a given y = 1 for b = 0 and b = 1."""
    if p1.d != pm1.d:
        raise DomainMismatch(f"Dimensions differ: {p1.d} vs {pm1.d}")
    if 2 * p1.d > MAX_FOURIER_BITS:
        raise EnumerationBudgetExceeded(
            f"Exhaustive translation sweep on {2 * p1.d} bits exceeds 2^{MAX_FOURIER_BITS}"
        )
    first, second = p1.distribution(), pm1.distribution()
    return product(first, second).pmf, product(second, first).pmf


def _correlate(law: np.ndarray, values: np.ndarray, n: int) -> np.ndarray:
    """a -> sum_u law(u) values(a * u), for every a."""
    spectrum = walsh_hadamard(law, n) * walsh_hadamard(values, n)
    return walsh_hadamard(spectrum, n) / 2**n


def gap_table(h: StatQuery, p1: ProductMixtureCube, pm1: ProductMixtureCube) -> np.ndarray:
    """Per-a gaps h(D_{a,0}) - h(D_{a,1}) for every a, indexed like cube_points."""
    law0, law1 = _joint_laws(p1, pm1)
    n = 2 * p1.d
    points = cube_points(n)
    ones = np.ones(len(points), dtype=np.int8)
    positive = h(points, ones)
    # x = -(a * u) carries label -1; reversing the index negates the point
    negative = h(points, -ones)[::-1]
    values = [
        0.5 * _correlate(law, positive, n) + 0.5 * _correlate(law, negative, n)
        for law in (law0, law1)
    ]
    return values[0] - values[1]


def gap_at(
    h: StatQuery, p1: ProductMixtureCube, pm1: ProductMixtureCube, a: np.ndarray
) -> float:
    """Gap of a query with a label-parity expansion at one translation a."""
    first = analytic_value(h, HardInstance(a, 0, p1, pm1))
    return first - analytic_value(h, HardInstance(a, 1, p1, pm1))


@dataclass(frozen=True)
class VarianceReport:
    """Both sides of E_a[(h1(P_a) - h1(Q_a))^2] = sum_S h1^(S)^2 (P^(S) - Q^(S))^2."""

    lhs: float
    rhs: float
    exhaustive: bool
    n_a: int

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)

    def as_dict(self) -> Dict[str, object]:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "difference": self.difference,
            "exhaustive": self.exhaustive,
            "n_a": self.n_a,
        }


def variance_identity_check(
    h1: Union[StatQuery, PointFunction],
    p1: ProductMixtureCube,
    pm1: ProductMixtureCube,
    n_a: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    tolerance: float = 1e-8,
) -> VarianceReport:
    """Compare the translation variance of a label-1 query with its Fourier sum.

    P is the law of (z1, z-1) and Q that of (z-1, z1); P_a and Q_a are their
    translates by a.

    Args:
        h1: Function of points, or a StatQuery restricted to label 1
        p1: The conditioned lift P_1
        pm1: The lift P_-1
        n_a: Number of sampled translations, None for all of them
        rng: Generator for sampled translations
        tolerance: Allowed absolute difference under exhaustive a

    Raises:
        CheckFailed: If exhaustive sides differ by more than ``tolerance``
    """
    if isinstance(h1, StatQuery):
        h1 = restrict_label(h1, 1)
    law_p, law_q = _joint_laws(p1, pm1)
    n = 2 * p1.d
    values = np.clip(np.asarray(h1(cube_points(n)), dtype=float), -1.0, 1.0)
    gaps = _correlate(law_p - law_q, values, n)
    coeffs = walsh_hadamard(values, n) / 2**n
    rhs = float(np.sum(coeffs**2 * walsh_hadamard(law_p - law_q, n) ** 2))

    if n_a is None:
        report = VarianceReport(float(np.mean(gaps**2)), rhs, True, len(gaps))
        if report.difference > tolerance:
            raise CheckFailed(
                f"Variance identity off by {report.difference:.3e} (lhs={report.lhs:.6e},"
                f" rhs={report.rhs:.6e})"
            )
        return report
    rng = rng if rng is not None else np.random.default_rng()
    picks = rng.integers(0, len(gaps), size=n_a)
    return VarianceReport(float(np.mean(gaps[picks] ** 2)), rhs, False, n_a)


def proportion_half_width(n: int, confidence: float = 0.99) -> float:
    """Hoeffding half-width for a frequency of n Bernoulli trials."""
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * n))


@dataclass(frozen=True)
class SweepReport:
    """Fraction of translations a on which some query gap reaches t."""

    t: float
    n_a: int
    queries: int
    theta: float
    fraction: float
    bound: float
    half_width: float
    exact_fraction: Optional[float] = None

    @property
    def within_bound(self) -> bool:
        return self.fraction <= self.bound + self.half_width

    def as_dict(self) -> Dict[str, object]:
        return {
            "t": self.t,
            "n_a": self.n_a,
            "queries": self.queries,
            "theta": self.theta,
            "fraction": self.fraction,
            "bound": self.bound,
            "half_width": self.half_width,
            "exact_fraction": self.exact_fraction,
            "within_bound": self.within_bound,
        }


def union_sweep(
    queries: Sequence[StatQuery],
    p1: ProductMixtureCube,
    pm1: ProductMixtureCube,
    t: float,
    n_a: int,
    rng: np.random.Generator,
    theta: Optional[float] = None,
    confidence: float = 0.99,
) -> SweepReport:
    """Empirical Pr_a[max over queries of |gap| >= t] against k * 2 theta^2 / t^2.

    theta defaults to twice the largest Fourier coefficient gap of the lifts.
    Gaps come from exhaustive tables when 2d is small enough and from label
    parity expansions otherwise.

    Raises:
        EnumerationBudgetExceeded: If a query has no expansion and 2d is too large
    """
    if t <= 0:
        raise ValueError(f"Threshold must be positive, got {t}")
    queries = list(queries)
    theta = 2 * fourier_gap(p1, pm1) if theta is None else theta
    bound = len(queries) * 2 * theta**2 / t**2
    n = 2 * p1.d

    exact_fraction = None
    if n <= MAX_FOURIER_BITS:
        table = np.vstack([np.abs(gap_table(h, p1, pm1)) for h in queries])
        hits = (table >= t).any(axis=0)
        exact_fraction = float(hits.mean())
        fraction = float(hits[rng.integers(0, hits.size, size=n_a)].mean())
    elif all(h.expansion is not None for h in queries):
        hits = np.zeros(n_a, dtype=bool)
        for i in range(n_a):
            a = rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
            hits[i] = any(abs(gap_at(h, p1, pm1, a)) >= t for h in queries)
        fraction = float(hits.mean())
    else:
        raise EnumerationBudgetExceeded(
            f"Opaque queries on {n} bits need 2d <= {MAX_FOURIER_BITS}"
        )
    report = SweepReport(
        t,
        n_a,
        len(queries),
        theta,
        fraction,
        min(bound, 1.0),
        proportion_half_width(n_a, confidence),
        exact_fraction,
    )
    _logger.debug(
        "Sweep over %d queries at t=%.3g: fraction %.4f, bound %.4g",
        len(queries),
        t,
        fraction,
        bound,
    )
    return report


def chebyshev_sweep(
    h: StatQuery,
    p1: ProductMixtureCube,
    pm1: ProductMixtureCube,
    t: float,
    n_a: int,
    rng: np.random.Generator,
    theta: Optional[float] = None,
    confidence: float = 0.99,
) -> SweepReport:
    """Empirical Pr_a[|gap| >= t] for one query against 2 theta^2 / t^2."""
    return union_sweep([h], p1, pm1, t, n_a, rng, theta, confidence)


@dataclass(frozen=True)
class TensorGapReport:
    trials: int
    max_violation: float
    factorization_error: float

    @property
    def holds(self) -> bool:
        return self.max_violation <= 1e-12 and self.factorization_error <= 1e-10

    def as_dict(self) -> Dict[str, object]:
        return {
            "trials": self.trials,
            "max_violation": self.max_violation,
            "factorization_error": self.factorization_error,
            "holds": self.holds,
        }


def tensor_gap_bound_check(
    p: DiscreteDistribution,
    p_other: DiscreteDistribution,
    q: DiscreteDistribution,
    q_other: DiscreteDistribution,
    trials: int,
    rng: np.random.Generator,
) -> TensorGapReport:
    """Check |(PxQ)^(S1,S2) - (P'xQ')^(S1,S2)| <= |P^(S1) - P'^(S1)| + |Q^(S2) - Q'^(S2)|.

    Also records how far product coefficients are from P^(S1) Q^(S2).

    Raises:
        DomainMismatch: If P, P' or Q, Q' live on different cubes
        CheckFailed: If the bound is violated
    """
    if p.domain != p_other.domain or q.domain != q_other.domain:
        raise DomainMismatch("Tensor check needs P, P' and Q, Q' on common cubes")
    n1, n2 = p.domain[1], q.domain[1]
    joint = product(p, q).fourier()
    joint_other = product(p_other, q_other).fourier()
    hat_p, hat_p_other = p.fourier(), p_other.fourier()
    hat_q, hat_q_other = q.fourier(), q_other.fourier()

    violations: List[float] = []
    factorization: List[float] = []
    for _ in range(trials):
        s1 = int(rng.integers(0, 2**n1))
        s2 = int(rng.integers(0, 2**n2))
        index = s1 | (s2 << n1)
        lhs = abs(joint[index] - joint_other[index])
        rhs = abs(hat_p[s1] - hat_p_other[s1]) + abs(hat_q[s2] - hat_q_other[s2])
        violations.append(lhs - rhs)
        factorization.append(abs(joint[index] - hat_p[s1] * hat_q[s2]))
    report = TensorGapReport(
        trials, float(max(violations, default=0.0)), float(max(factorization, default=0.0))
    )
    if not report.holds:
        raise CheckFailed(
            f"Tensor gap bound violated by {report.max_violation:.3e}"
            f" (factorization error {report.factorization_error:.3e})"
        )
    return report
