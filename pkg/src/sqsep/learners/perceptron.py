"""Perceptron driven by statistical queries.

Each round asks for the error of the current halfspace, the mistake
probability p and the D coordinates of E[y x 1(y <w, x> <= 0)], then adds
the conditional mean update u / p. With an exact oracle and points scaled
into the unit ball, a margin-gamma instance needs at most 1/gamma^2 updates.
"""

from typing import Optional
import logging
import math

import numpy as np

from sqsep.errors import NoProgress, QueryBudgetExceeded
from sqsep.sq import SqOracleSession, halfspace_error, margin_mistake, perceptron_update

from .hypothesis import Hypothesis, LearnerResult


_logger = logging.getLogger("sqsep.console")

NAME = "perceptron"


def perceptron_sq(
    session: SqOracleSession,
    dimension: int,
    gamma: float,
    max_rounds: int = 200,
    target: float = 0.05,
    scale: Optional[float] = None,
) -> LearnerResult:
    """Run the SQ Perceptron on an adaptive session.

    Args:
        session: Adaptive oracle session
        dimension: Dimension D of the points
        gamma: Margin of the instance, used for the tolerance check only
        max_rounds: Rounds before giving up
        target: Stop once the queried error is at most this value
        scale: Factor bringing points into the unit ball (default 1/sqrt(D))

    Returns:
        LearnerResult whose hypothesis has error at most target + 2 tau

    Raises:
        NoProgress: After max_rounds rounds, when the update vanishes or when
            the session budget runs out; the last state is attached
    """
    scale = 1.0 / math.sqrt(dimension) if scale is None else scale
    if session.tolerance > gamma / 8:
        _logger.warning(
            "Tolerance %.3g exceeds gamma/8 = %.3g; updates may lose correlation",
            session.tolerance,
            gamma / 8,
        )
    params = {"max_rounds": max_rounds, "target": target, "scale": scale}
    w = np.zeros(dimension)
    err = None

    def result(rounds: int) -> LearnerResult:
        return LearnerResult(
            NAME,
            Hypothesis(w),
            dict(params, updates=max(rounds - 1, 0)),
            rounds=rounds,
            queries_used=session.queries_used,
            final_err=err,
        )

    for rounds in range(1, max_rounds + 1):
        try:
            err = session.query(halfspace_error(w))
            if err <= target:
                _logger.debug("Perceptron reached error %.4g after %d rounds", err, rounds)
                return result(rounds)
            mistakes = session.query(margin_mistake(w, 0.0, scale))
            update = np.array(
                [session.query(perceptron_update(w, j, scale)) for j in range(dimension)]
            )
        except QueryBudgetExceeded as e:
            raise NoProgress(f"Query budget ran out in round {rounds}: {e}", result(rounds)) from e
        if mistakes <= 0 or not np.any(update):
            raise NoProgress(
                f"Update vanished in round {rounds} at error {err:.4g}", result(rounds)
            )
        w = w + update / mistakes

    raise NoProgress(f"No convergence within {max_rounds} rounds", result(max_rounds + 1))
