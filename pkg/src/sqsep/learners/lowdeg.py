"""Non-adaptive baseline built from low-degree label correlations."""

from typing import List, Optional
import itertools
import logging

import numpy as np

from sqsep.sq import SqOracleSession, StatQuery, correlation, parity

from .hypothesis import Hypothesis, LearnerResult


_logger = logging.getLogger("sqsep.console")

NAME = "lowdeg"


def declared_queries(
    dimension: int,
    max_degree: int,
    budget: Optional[int],
    rng: np.random.Generator,
) -> List[StatQuery]:
    """All degree-1 correlations, then random label parities of degree 2..max_degree.

    Higher-degree parities fill the budget in random order; without a budget
    every parity up to max_degree is declared.
    """
    queries = [correlation(i) for i in range(dimension)]
    higher = [
        subset
        for size in range(2, max_degree + 1)
        for subset in itertools.combinations(range(dimension), size)
    ]
    room = len(higher) if budget is None else max(budget - dimension, 0)
    if room < len(higher):
        picks = np.sort(rng.choice(len(higher), size=room, replace=False))
        higher = [higher[i] for i in picks]
    return queries + [parity(subset) for subset in higher]


def lowdeg_nonadaptive(
    session: SqOracleSession,
    dimension: int,
    rng: np.random.Generator,
    max_degree: int = 3,
) -> LearnerResult:
    """Declare every query upfront and predict with sign(<w, x>), w_i = E[y x_i].

    Raises:
        QueryBudgetExceeded: If the degree-1 correlations alone exceed the budget
    """
    queries = declared_queries(dimension, max_degree, session.budget, rng)
    answers = np.asarray(session.run(queries))
    w = answers[:dimension]
    _logger.debug("Low-degree learner declared %d queries", len(queries))
    return LearnerResult(
        NAME,
        Hypothesis(w),
        {"max_degree": max_degree, "declared": len(queries)},
        rounds=1,
        queries_used=session.queries_used,
    )
