"""The random Gaussian halfspace learner.

Draws m standard normal directions, asks for the error of each as one
non-adaptive query set and keeps the best. With
m = ceil(exp(c log(1/eps) / gamma^2)) candidates some direction has error at
most 2 eps with constant probability.
"""

import logging
import math

import numpy as np

from sqsep.errors import ParameterError
from sqsep.sq import SqOracleSession, halfspace_error

from .hypothesis import Hypothesis, LearnerResult


_logger = logging.getLogger("sqsep.console")

NAME = "random-halfspace"
THRESHOLD_MODES = ("error", "advantage")


def candidate_count(gamma: float, eps: float, c: float = 1.0) -> int:
    """ceil(exp(c log(1/eps) / gamma^2))."""
    if not 0 < eps < 1 or gamma <= 0:
        raise ParameterError(f"Need eps in (0, 1) and gamma > 0, got eps={eps}, gamma={gamma}")
    return math.ceil(math.exp(c * math.log(1.0 / eps) / gamma**2))


def draw_candidates(rng: np.random.Generator, m: int, dimension: int) -> np.ndarray:
    """m standard normal rows; the first m' rows do not depend on m."""
    return rng.standard_normal((m, dimension))


def random_halfspace_learner(
    session: SqOracleSession,
    dimension: int,
    m: int,
    rng: np.random.Generator,
    threshold_mode: str = "error",
) -> LearnerResult:
    """Pick the best of m random halfspaces with one declared query set.

    Args:
        session: Non-adaptive (or adaptive) oracle session
        dimension: Dimension D of the points
        m: Number of candidates
        rng: Generator the candidates are drawn from
        threshold_mode: "error" keeps the smallest queried error; "advantage"
            keeps the largest |1/2 - err|, flipping the direction if needed

    Raises:
        QueryBudgetExceeded: If m exceeds the session budget
    """
    if threshold_mode not in THRESHOLD_MODES:
        raise ParameterError(
            f"Unknown threshold mode '{threshold_mode}', expected one of {THRESHOLD_MODES}"
        )
    if m < 1:
        raise ParameterError(f"Need at least one candidate, got m={m}")
    candidates = draw_candidates(rng, m, dimension)
    queries = [halfspace_error(w, f"cand{i}") for i, w in enumerate(candidates)]
    errors = np.asarray(session.run(queries))

    if threshold_mode == "error":
        best = int(np.argmin(errors))
        w, err = candidates[best], float(errors[best])
    else:
        best = int(np.argmax(np.abs(0.5 - errors)))
        flip = errors[best] > 0.5
        w = -candidates[best] if flip else candidates[best]
        err = float(1.0 - errors[best] if flip else errors[best])
    _logger.debug("Best of %d random halfspaces: error %.4g", m, err)
    return LearnerResult(
        NAME,
        Hypothesis(w),
        {"m": m, "threshold_mode": threshold_mode, "best_index": best},
        rounds=1,
        queries_used=session.queries_used,
        final_err=err,
    )
