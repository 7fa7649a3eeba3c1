"""Local randomizers with closed-form kernels.

A local randomizer R maps one user's labeled sample z = (x, y) to a message
w in a finite message space. It is epsilon-DP when
Pr[R(z1) = w] <= e^epsilon Pr[R(z2) = w] for all z1, z2 and w, which is
checked by ``audit_epsilon`` against the kernel on probe inputs.
"""

from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple
import itertools
import logging
import math

import numpy as np

from sqsep.errors import ParameterError, PrivacyViolation
from sqsep.sq.queries import StatQuery


_logger = logging.getLogger("sqsep.console")

AUDIT_SLACK = 1e-12


class LocalRandomizer(ABC):
    """A randomized map from one sample to a message.

    Attributes:
        epsilon: Claimed privacy parameter (math.inf for none)
        message_space: Finite tuple of messages
        randomizer_id: Stable name used in transcripts
    """

    def __init__(self, epsilon: float, message_space: Tuple, randomizer_id: str):
        if not epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {epsilon}")
        self.epsilon = float(epsilon)
        self.message_space = tuple(message_space)
        self.randomizer_id = randomizer_id

    @abstractmethod
    def kernel(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Message probabilities, shape (n, |message_space|), for n inputs."""

    def randomize(self, rng: np.random.Generator, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Draw one message per input."""
        probs = self.kernel(X, y)
        cumulative = np.cumsum(probs, axis=1)
        draws = rng.random(len(probs))[:, None]
        picks = np.minimum((draws >= cumulative).sum(axis=1), len(self.message_space) - 1)
        return np.asarray(self.message_space, dtype=object)[picks]

    def estimate(self, messages: np.ndarray) -> np.ndarray:
        """Per-user unbiased estimates of the underlying statistic."""
        raise NotImplementedError(f"{self.randomizer_id} has no estimator")

    @property
    def variance_bound(self) -> float:
        """Upper bound on the variance of one per-user estimate."""
        raise NotImplementedError(f"{self.randomizer_id} has no estimator")


class RandomizedResponse(LocalRandomizer):
    """One-bit randomized response on a bounded query.

    h(z) in [-1, 1] is first rounded to B in {-1, 1} with E[B] = h(z), and B
    is kept with probability e^eps / (e^eps + 1), so
    Pr[w = 1] = (1 + c h(z)) / 2 with c = (e^eps - 1) / (e^eps + 1), and w / c
    is unbiased for h(z).

    The flip probability is fixed from ``epsilon`` at construction; ``claimed``
    overrides the privacy level the randomizer advertises, which is what
    ``audit_epsilon`` holds the kernel to.
    """

    def __init__(self, query: StatQuery, epsilon: float, claimed: Optional[float] = None):
        super().__init__(
            epsilon if claimed is None else claimed,
            (-1, 1),
            f"rr[{query.descriptor},{epsilon:g}]",
        )
        if not epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {epsilon}")
        self.query = query
        self.contraction = 1.0 if math.isinf(epsilon) else math.tanh(epsilon / 2)

    def kernel(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        positive = 0.5 * (1.0 + self.contraction * self.query(X, y))
        return np.column_stack([1.0 - positive, positive])

    def randomize(self, rng: np.random.Generator, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        positive = self.kernel(X, y)[:, 1]
        return np.where(rng.random(len(positive)) < positive, 1, -1).astype(np.int8)

    def estimate(self, messages: np.ndarray) -> np.ndarray:
        return np.asarray(messages, dtype=float) / self.contraction

    @property
    def variance_bound(self) -> float:
        return 1.0 / self.contraction**2


class Passthrough(RandomizedResponse):
    """Rounding without the response flip: the epsilon -> infinity limit."""

    def __init__(self, query: StatQuery):
        super().__init__(query, math.inf)
        self.randomizer_id = f"passthrough[{query.descriptor}]"


class ConstantRandomizer(LocalRandomizer):
    """Ignores its input and always sends the same message."""

    def __init__(self, message=0, epsilon: float = 1.0):
        super().__init__(epsilon, (message,), f"constant[{message}]")

    def kernel(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.ones((len(y), 1))


class ComposedRandomizer(LocalRandomizer):
    """Independent randomizers applied to the same sample; epsilons add up."""

    def __init__(self, parts: Sequence[LocalRandomizer]):
        if not parts:
            raise ParameterError("Composition needs at least one randomizer")
        super().__init__(
            sum(part.epsilon for part in parts),
            tuple(itertools.product(*(part.message_space for part in parts))),
            "+".join(part.randomizer_id for part in parts),
        )
        self.parts = tuple(parts)

    def kernel(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        joint = np.ones((len(y), 1))
        for part in self.parts:
            probs = part.kernel(X, y)
            joint = (joint[:, :, None] * probs[:, None, :]).reshape(len(y), -1)
        return joint


def rr_randomizer(query: StatQuery, epsilon: float) -> LocalRandomizer:
    """Randomized response for ``query``; infinite epsilon gives Passthrough."""
    if math.isinf(epsilon):
        return Passthrough(query)
    return RandomizedResponse(query, epsilon)


def extreme_probes(dimension: int, rng: Optional[np.random.Generator] = None, n: int = 64):
    """Probe inputs: random labeled cube points plus both constant points."""
    rng = rng if rng is not None else np.random.default_rng(0)
    signs = np.array([-1, 1], dtype=np.int8)
    X = np.vstack(
        [
            rng.choice(signs, size=(n, dimension)),
            np.ones((1, dimension), dtype=np.int8),
            -np.ones((1, dimension), dtype=np.int8),
        ]
    )
    y = np.concatenate([rng.choice(signs, size=n), signs[::-1]]).astype(np.int8)
    return X, y


def audit_epsilon(randomizer: LocalRandomizer, X: np.ndarray, y: np.ndarray) -> float:
    """Largest log Pr[R(z1) = w] / Pr[R(z2) = w] over probe pairs and messages.

    Raises:
        PrivacyViolation: If the value exceeds the claimed epsilon
    """
    probs = randomizer.kernel(X, y)
    if np.any(probs < 0) or not np.allclose(probs.sum(axis=1), 1.0, atol=1e-12):
        raise PrivacyViolation(f"{randomizer.randomizer_id} has an invalid kernel")
    worst = 0.0
    for column in probs.T:
        high, low = column.max(), column.min()
        if high == 0:
            continue
        worst = max(worst, math.inf if low == 0 else math.log(high / low))
    if worst > randomizer.epsilon + AUDIT_SLACK:
        raise PrivacyViolation(
            f"{randomizer.randomizer_id} reaches log-ratio {worst:.6g}"
            f" above epsilon={randomizer.epsilon:.6g}"
        )
    _logger.debug("Audited %s: %.12g", randomizer.randomizer_id, worst)
    return worst
