"""The labeled hard family (D_{a,b}, f_{a,b}) on {-1, 1}^{2d}.

For b = 0 a point is x = a * (y z1, y z-1) and for b = 1 it is
x = a * (y z-1, y z1), with y uniform in {-1, 1}, z1 ~ P_1 and z-1 ~ P_-1
drawn independently. The target f_{a,0} is the a-weighted majority of the
first d coordinates and f_{a,1} that of the last d, so f_{a,b}(x) = y on
every generated point as long as P_1 has positive coordinate sums.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple
import logging

import numpy as np

from sqsep.cube.distances import MAX_CUBE_BITS, DiscreteDistribution, cube_points, product
from sqsep.cube.lift import ProductMixtureCube, lift
from sqsep.errors import (
    DimensionTooSmall,
    EnumerationBudgetExceeded,
    ParameterError,
    ZeroWeightVector,
)
from sqsep.moments import (
    AtomicMeasure,
    ConstructionParams,
    HybridMeasure,
    MixtureP,
    construct_q,
    rescale_and_condition,
)


_logger = logging.getLogger("sqsep.console")


def sign(values: np.ndarray) -> np.ndarray:
    """Elementwise sign with sign(0) = +1."""
    return np.where(np.asarray(values) >= 0, 1, -1).astype(np.int8)


@dataclass(frozen=True)
class LabeledCloud:
    """Finite labeled sample or exact support with probabilities.

    Attributes:
        X: Points, shape (n, D)
        y: Labels in {-1, 1}, shape (n,)
        weights: Probabilities summing to one; None means uniform
    """

    X: np.ndarray
    y: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if len(self.X) != len(self.y):
            raise ValueError("Points and labels differ in length")

    def __len__(self) -> int:
        return len(self.y)

    @property
    def probs(self) -> np.ndarray:
        if self.weights is None:
            return np.full(len(self.y), 1.0 / max(len(self.y), 1))
        return self.weights

    def expect(self, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float:
        """E[fn(x, y)] with values clipped to [-1, 1]."""
        values = np.clip(np.asarray(fn(self.X, self.y), dtype=float), -1.0, 1.0)
        return float(self.probs @ values)

    def accuracy(self, predict: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(self.probs @ (predict(self.X) == self.y))


@dataclass(frozen=True)
class HardInstance:
    """One member (D_{a,b}, f_{a,b}) of the hard family."""

    a: np.ndarray
    b: int
    p1: ProductMixtureCube
    pm1: ProductMixtureCube

    def __post_init__(self):
        a = np.asarray(self.a)
        if self.p1.d != self.pm1.d:
            raise ParameterError("P_1 and P_-1 must share the dimension")
        if a.shape != (2 * self.p1.d,) or not np.all(np.abs(a) == 1):
            raise ParameterError(f"a must be a +-1 vector of length {2 * self.p1.d}")
        if self.b not in (0, 1):
            raise ParameterError(f"b must be 0 or 1, got {self.b}")
        object.__setattr__(self, "a", a.astype(np.int8))

    @property
    def d(self) -> int:
        return self.p1.d

    @property
    def dimension(self) -> int:
        return 2 * self.d

    def target_slice(self) -> slice:
        return slice(0, self.d) if self.b == 0 else slice(self.d, 2 * self.d)

    def target(self, X: np.ndarray) -> np.ndarray:
        """f_{a,b}(x) = sign(sum over the b-th half of a_i x_i)."""
        half = self.target_slice()
        return sign(np.asarray(X)[:, half].astype(np.int64) @ self.a[half].astype(np.int64))

    def weight_vector(self) -> np.ndarray:
        """(a restricted to the target half, 0 elsewhere), the separating direction."""
        w = np.zeros(self.dimension)
        half = self.target_slice()
        w[half] = self.a[half]
        return w

    def assemble(self, y: np.ndarray, z1: np.ndarray, zm1: np.ndarray) -> LabeledCloud:
        """Build labeled points from hidden labels and half draws."""
        u = np.hstack([z1, zm1]) if self.b == 0 else np.hstack([zm1, z1])
        X = (self.a[None, :] * y[:, None] * u).astype(np.int8)
        return LabeledCloud(X, y.astype(np.int8))

    def sample(self, rng: np.random.Generator, n: int) -> LabeledCloud:
        y = rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
        z1 = self.p1.sample(rng, n)
        zm1 = self.pm1.sample(rng, n)
        return self.assemble(y, z1, zm1)

    def half_distributions(
        self, max_bits: int = MAX_CUBE_BITS
    ) -> Tuple[DiscreteDistribution, DiscreteDistribution]:
        """Laws of the first and second half of y * u given y, before translation."""
        first, second = (self.p1, self.pm1) if self.b == 0 else (self.pm1, self.p1)
        return first.distribution(max_bits), second.distribution(max_bits)

    def label_conditioned(self, max_bits: int = MAX_CUBE_BITS) -> DiscreteDistribution:
        """Law of u = y * x / a given y = 1, over {-1, 1}^{2d}."""
        if self.dimension > max_bits:
            raise EnumerationBudgetExceeded(
                f"Joint enumeration of 2^{self.dimension} points exceeds 2^{max_bits}"
            )
        return product(*self.half_distributions(max_bits))

    def exact_cloud(self, max_bits: int = MAX_CUBE_BITS) -> LabeledCloud:
        """Full support of D_{a,b} with exact probabilities.

        Raises:
            EnumerationBudgetExceeded: If 2d exceeds ``max_bits``
        """
        joint = self.label_conditioned(max_bits).pmf
        keep = joint > 0
        points = cube_points(self.dimension, max_bits)[keep] * self.a[None, :]
        X = np.vstack([points, -points]).astype(np.int8)
        n = len(points)
        y = np.concatenate([np.ones(n, dtype=np.int8), -np.ones(n, dtype=np.int8)])
        weights = np.concatenate([joint[keep], joint[keep]]) / 2
        return LabeledCloud(X, y, weights / weights.sum())


@dataclass(frozen=True)
class InstancePair:
    """The two instances b = 0 and b = 1 sharing a translation vector a."""

    a: np.ndarray
    p1: ProductMixtureCube
    pm1: ProductMixtureCube
    instances: Tuple[HardInstance, HardInstance] = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            "instances",
            (
                HardInstance(self.a, 0, self.p1, self.pm1),
                HardInstance(self.a, 1, self.p1, self.pm1),
            ),
        )

    def instance(self, b: int) -> HardInstance:
        return self.instances[b]

    def sample_clouds(
        self, rng: np.random.Generator, n: int
    ) -> Tuple[LabeledCloud, LabeledCloud]:
        """Coupled samples: both clouds reuse the same y, z1 and z-1 draws."""
        y = rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
        z1 = self.p1.sample(rng, n)
        zm1 = self.pm1.sample(rng, n)
        return tuple(inst.assemble(y, z1, zm1) for inst in self.instances)

    def exact_clouds(self, max_bits: int = MAX_CUBE_BITS) -> Tuple[LabeledCloud, LabeledCloud]:
        return tuple(inst.exact_cloud(max_bits) for inst in self.instances)


@dataclass(frozen=True)
class HardFamily:
    """Everything needed to instantiate D_{a,b} for any a at a fixed dimension."""

    params: ConstructionParams
    d: int
    q: AtomicMeasure
    p_prime: HybridMeasure
    q_prime: AtomicMeasure
    p1: ProductMixtureCube
    pm1: ProductMixtureCube

    @property
    def threshold(self) -> Optional[float]:
        return self.p1.threshold

    def random_a(self, rng: np.random.Generator) -> np.ndarray:
        return rng.choice(np.array([-1, 1], dtype=np.int8), size=2 * self.d)

    def pair(self, a: np.ndarray) -> InstancePair:
        return InstancePair(np.asarray(a), self.p1, self.pm1)

    def instance(self, a: np.ndarray, b: int) -> HardInstance:
        return HardInstance(np.asarray(a), b, self.p1, self.pm1)


def build_family(
    params: ConstructionParams,
    d: int,
    threshold: Optional[float] = None,
    method: str = "kernel",
    check_dimension: bool = True,
) -> HardFamily:
    """Construct Q, the rescaled pair (P', Q') and the lifts P_1, P_-1.

    Args:
        params: Construction parameters
        d: Half dimension of the cube
        threshold: Majority conditioning threshold for P_1 (default gamma~/2)
        method: Construction method passed to construct_q
        check_dimension: Enforce d >= gamma^(-2-2r/5)

    Raises:
        DimensionTooSmall: If ``check_dimension`` and d is below the minimum
    """
    params.validate()
    if check_dimension and params.r is not None and d < params.min_dimension:
        raise DimensionTooSmall(
            f"d={d} is below the required dimension {params.min_dimension}"
        )
    q = construct_q(params, method=method)
    p_prime, q_prime = rescale_and_condition(MixtureP(params.eta), q, params)
    threshold = params.gamma_tilde / 2 if threshold is None else threshold
    p1 = lift(p_prime, d, threshold)
    pm1 = lift(q_prime, d)
    _logger.debug(
        "Built family d=%d k=%d: P_1 conditioned mass %.3e", d, params.k, p1.conditioned_mass
    )
    return HardFamily(params, d, q, p_prime, q_prime, p1, pm1)


def build_instance(
    params: ConstructionParams,
    a: np.ndarray,
    b: int,
    family: Optional[HardFamily] = None,
    **kwargs,
) -> HardInstance:
    """Instance (D_{a,b}, f_{a,b}) for a +-1 vector a of length 2d.

    Raises:
        DimensionTooSmall: If d is below gamma^(-2-2r/5)
    """
    a = np.asarray(a)
    if a.ndim != 1 or len(a) % 2:
        raise ParameterError("a must be a vector of even length 2d")
    d = len(a) // 2
    if family is None:
        family = build_family(params, d, **kwargs)
    elif family.d != d:
        raise ParameterError(f"Family has d={family.d}, a implies d={d}")
    return family.instance(a, b)


def margin_of(w: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    """min over points of y <x, w> / (|x| |w|).

    Raises:
        ZeroWeightVector: If w = 0
    """
    w = np.asarray(w, dtype=float)
    norm_w = np.linalg.norm(w)
    if norm_w == 0:
        raise ZeroWeightVector("Margin is undefined for the zero vector")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if len(X) == 0:
        raise ValueError("Margin needs at least one point")
    norms = np.linalg.norm(X, axis=1)
    return float(np.min(np.asarray(y) * (X @ w) / (norms * norm_w)))


def agreement_rate(p1: ProductMixtureCube, pm1: ProductMixtureCube) -> float:
    """Pr over D_{a,b} that f_{a,0} and f_{a,1} agree, the same for every a and b.

    Both targets reduce to sign(y S) where S is the coordinate sum of one
    half, so the probability is exact over count classes.
    """
    d = p1.d
    sums = 2 * np.arange(d + 1) - d
    total = 0.0
    for y in (-1, 1):
        agree = sign(y * sums)[:, None] == sign(y * sums)[None, :]
        total += 0.5 * float(p1.count_pmf @ agree.astype(float) @ pm1.count_pmf)
    return total


def instance_tv(p1: ProductMixtureCube, pm1: ProductMixtureCube) -> float:
    """Exact TV between the point marginals of D_{a,0} and D_{a,1}.

    The marginal of D_{a,0} is the symmetrization (J(x) + J(-x))/2 of
    J = P_1 x P_-1, translated by a; translation cancels in the distance and
    the symmetrized laws are uniform on pairs of count classes.
    """
    first = np.outer(p1.count_pmf, pm1.count_pmf)
    second = np.outer(pm1.count_pmf, p1.count_pmf)
    first = (first + first[::-1, ::-1]) / 2
    second = (second + second[::-1, ::-1]) / 2
    return float(0.5 * np.abs(first - second).sum())


def p1_negation_tv(p1: ProductMixtureCube, pm1: ProductMixtureCube) -> float:
    """TV(P_1, -P_-1), exact over count classes."""
    return float(0.5 * np.abs(p1.count_pmf - pm1.count_pmf[::-1]).sum())


def certificate_block(family: HardFamily) -> Dict[str, float]:
    """Lift-level quantities recorded in instance files."""
    return {
        "p1_conditioned_mass": family.p1.conditioned_mass,
        "tv_p1_neg_pm1": p1_negation_tv(family.p1, family.pm1),
        "tv_instances": instance_tv(family.p1, family.pm1),
        "agreement": agreement_rate(family.p1, family.pm1),
    }
