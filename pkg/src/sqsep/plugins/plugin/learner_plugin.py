"""Learner plugin interface for sqsep plugins."""

from abc import abstractmethod
from typing import TYPE_CHECKING, Any, Dict, Optional

import numpy as np

from .plugin import BasePlugin

if TYPE_CHECKING:
    from sqsep.learners.hypothesis import LearnerResult
    from sqsep.sq.oracle import SqOracleSession


class LearnerPlugin(BasePlugin):
    """
    Base class for learner plugins.

    Learner plugins run a learning algorithm against an oracle session.
    ``adaptive`` tells the harness which kind of session to open.
    """

    options: Dict[str, Any] = {}

    @property
    @abstractmethod
    def adaptive(self) -> bool:
        """Whether the learner needs an adaptive (interactive) session"""

    def query_budget(self, dimension: int, gamma: float) -> Optional[int]:
        """Queries the learner will ask in a session, None if unknown upfront."""
        return None

    @abstractmethod
    def learn(
        self,
        session: "SqOracleSession",
        dimension: int,
        gamma: float,
        rng: np.random.Generator,
    ) -> "LearnerResult":
        """
        Run the learner.

        Args:
            session: Oracle session to query
            dimension: Dimension of the instance space
            gamma: Margin of the instance
            rng: Random generator owned by this run
        """
