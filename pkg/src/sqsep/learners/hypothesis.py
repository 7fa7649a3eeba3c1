"""Halfspace hypotheses and serialized learner results."""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from sqsep.cube import LabeledCloud, sign


@dataclass(frozen=True)
class Hypothesis:
    """x -> sign(<w, x>) with sign(0) = +1."""

    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.w))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return sign(np.asarray(X, dtype=float) @ self.w)

    def project(self, radius: float = 1.0) -> "Hypothesis":
        """Radial projection onto the ball of the given radius."""
        norm = self.norm
        if norm <= radius:
            return self
        return Hypothesis(self.w * (radius / norm))

    def error(self, cloud: LabeledCloud) -> float:
        return 1.0 - cloud.accuracy(self.predict)


@dataclass
class LearnerResult:
    """Output of one learner run.

    Attributes:
        learner: Learner name
        hypothesis: Final hypothesis
        params: Learner parameters
        seed: Seed of the run, when known
        rounds: Interaction rounds (1 for non-adaptive learners)
        queries_used: Statistical queries asked
        final_err: Error reported by the oracle for the final hypothesis
        final_loss: Final surrogate loss, for loss-based learners
    """

    learner: str
    hypothesis: Hypothesis
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    rounds: int = 0
    queries_used: int = 0
    final_err: Optional[float] = None
    final_loss: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "learner": self.learner,
            "params": self.params,
            "seed": self.seed,
            "rounds": self.rounds,
            "queries_used": self.queries_used,
            "final_err": self.final_err,
            "final_loss": self.final_loss,
        }
