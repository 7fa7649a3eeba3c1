"""Statistical queries h: {-1, 1}^D x {-1, 1} -> [-1, 1].

Evaluators are vectorized: they take points X of shape (n, D) and labels y
of shape (n,) and return n values. Queries that are finite sums of label
parities c * chi_S(x) * y^e may carry that expansion, which lets oracles
evaluate them exactly on the hard family at any dimension.
"""

from dataclasses import dataclass
import hashlib
from typing import Callable, Iterable, Optional, Tuple

import numpy as np


Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]
# (S, label power e, coefficient) terms of sum c * chi_S(x) * y^e
Expansion = Tuple[Tuple[Tuple[int, ...], int, float], ...]


@dataclass(frozen=True)
class StatQuery:
    """A bounded statistical query.

    Attributes:
        fn: Vectorized evaluator
        descriptor: Stable human-readable name, used in transcripts
        fourier_support_hint: Largest |S| with a nonzero coefficient, if known
        neutral: Value an uninformative answer collapses to
        expansion: Optional label-parity expansion of ``fn``
    """

    fn: Evaluator
    descriptor: str
    fourier_support_hint: Optional[int] = None
    neutral: float = 0.0
    expansion: Optional[Expansion] = None

    def __call__(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        values = np.asarray(self.fn(X, y), dtype=float)
        if values.shape != (len(y),):
            raise ValueError(f"Query {self.descriptor} returned shape {values.shape}")
        return np.clip(values, -1.0, 1.0)


def _expansion_query(terms: Expansion, descriptor: str, neutral: float = 0.0) -> StatQuery:
    def fn(X, y):
        X = np.asarray(X, dtype=float)
        total = np.zeros(len(y))
        for subset, power, coeff in terms:
            chi = np.prod(X[:, list(subset)], axis=1) if subset else np.ones(len(y))
            total += coeff * chi * np.asarray(y, dtype=float) ** power
        return total

    hint = max((len(subset) for subset, _, _ in terms), default=0)
    return StatQuery(fn, descriptor, hint, neutral, terms)


def constant(value: float = 1.0) -> StatQuery:
    return _expansion_query((((), 0, float(value)),), f"const({value:g})")


def label() -> StatQuery:
    return _expansion_query((((), 1, 1.0),), "y")


def correlation(i: int) -> StatQuery:
    """y * x_i."""
    return _expansion_query((((int(i),), 1, 1.0),), f"y*x[{i}]")


def parity(subset: Iterable[int], with_label: bool = True) -> StatQuery:
    """chi_S(x), times y when ``with_label``."""
    subset = tuple(sorted(int(i) for i in subset))
    name = "chi(" + ",".join(map(str, subset)) + ")"
    return _expansion_query(
        ((subset, 1 if with_label else 0, 1.0),), f"y*{name}" if with_label else name
    )


def _predict(w: np.ndarray, X: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(X, dtype=float) @ w >= 0, 1, -1)


def halfspace_error(w: np.ndarray, tag: str = "") -> StatQuery:
    """1(sign(<w, x>) != y), the 0-1 error of the halfspace w."""
    w = np.asarray(w, dtype=float)
    return StatQuery(
        lambda X, y: (_predict(w, X) != y).astype(float),
        f"err[{tag or vector_digest(w)}]",
        neutral=0.5,
    )


def margin_mistake(w: np.ndarray, margin: float = 0.0, scale: float = 1.0) -> StatQuery:
    """1(y <w, scale * x> <= margin)."""
    w = np.asarray(w, dtype=float)

    def fn(X, y):
        return (y * (scale * np.asarray(X, dtype=float) @ w) <= margin).astype(float)

    return StatQuery(fn, f"mistake[{vector_digest(w)},{margin:g}]", neutral=0.5)


def perceptron_update(w: np.ndarray, j: int, scale: float = 1.0) -> StatQuery:
    """y * scale * x_j * 1(y <w, x> <= 0), coordinate j of the expected update."""
    w = np.asarray(w, dtype=float)

    def fn(X, y):
        X = np.asarray(X, dtype=float)
        mistaken = y * (X @ w) <= 0
        return y * scale * X[:, j] * mistaken

    return StatQuery(fn, f"update[{vector_digest(w)},{j}]")


def from_function(fn: Evaluator, descriptor: str, neutral: float = 0.0) -> StatQuery:
    return StatQuery(fn, descriptor, neutral=neutral)


def restrict_label(h: StatQuery, value: int) -> Callable[[np.ndarray], np.ndarray]:
    """x -> h(x, value), the label-restricted query h_value."""

    def restricted(X):
        return h(X, np.full(len(X), value, dtype=np.int8))

    return restricted


def vector_digest(w: np.ndarray) -> str:
    """Short stable tag for a weight vector."""
    return hashlib.sha1(np.ascontiguousarray(w, dtype=float).tobytes()).hexdigest()[:10]
