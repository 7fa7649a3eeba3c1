"""Projected gradient descent on a margin loss with gradients from statistical queries."""

from typing import Optional
import logging
import math

import numpy as np

from sqsep.errors import DivergenceDetected, ParameterError
from sqsep.sq import SqOracleSession, StatQuery
from sqsep.sq.queries import vector_digest

from .hypothesis import Hypothesis, LearnerResult
from .losses import LossSpec, unit_rows


_logger = logging.getLogger("sqsep.console")

NAME = "sq-gradient"


def loss_gradient_query(w: np.ndarray, j: int, loss: LossSpec) -> StatQuery:
    """Coordinate j of the loss gradient, divided by the Lipschitz constant."""
    w = np.asarray(w, dtype=float)

    def fn(X, y):
        X = unit_rows(X)
        t = y * (X @ w)
        return loss.derivative(t) * y * X[:, j] / loss.lipschitz

    return StatQuery(fn, f"grad[{loss.kind},{vector_digest(w)},{j}]")


def loss_value_query(w: np.ndarray, loss: LossSpec) -> StatQuery:
    """The loss at w, divided by its largest value on [-1, 1]."""
    w = np.asarray(w, dtype=float)

    def fn(X, y):
        return loss.value(y * (unit_rows(X) @ w)) / loss.max_value

    return StatQuery(fn, f"loss[{loss.kind},{vector_digest(w)}]")


def sq_gradient_descent(
    session: SqOracleSession,
    loss: LossSpec,
    dimension: int,
    steps: int,
    step_size: Optional[float] = None,
    w0: Optional[np.ndarray] = None,
    radius: float = 1.0,
    divergence_factor: float = 10.0,
) -> LearnerResult:
    """Minimize E[loss(y <w, x>)] over the ball of the given radius.

    Points are normalized to the unit sphere inside the queries. Each step
    asks D gradient coordinates and the loss at the new point.

    Args:
        session: Adaptive oracle session
        loss: Margin loss
        dimension: Dimension D of the points
        steps: Number of gradient steps
        step_size: Step length, default 1 / (L sqrt(steps))
        w0: Starting point, default 0
        radius: Radius of the feasible ball
        divergence_factor: Allowed growth of the loss over its initial value

    Raises:
        DivergenceDetected: If the loss exceeds divergence_factor times its
            initial value
    """
    if steps < 0:
        raise ParameterError(f"steps must be nonnegative, got {steps}")
    if step_size is None:
        step_size = 1.0 / (loss.lipschitz * math.sqrt(max(steps, 1)))
    start = np.zeros(dimension) if w0 is None else np.asarray(w0, dtype=float)
    w = Hypothesis(start).project(radius)

    initial = session.query(loss_value_query(w.w, loss)) * loss.max_value
    current = initial
    for step in range(steps):
        grad = loss.lipschitz * np.array(
            [session.query(loss_gradient_query(w.w, j, loss)) for j in range(dimension)]
        )
        w = Hypothesis(w.w - step_size * grad).project(radius)
        current = session.query(loss_value_query(w.w, loss)) * loss.max_value
        if initial > 0 and current > divergence_factor * initial:
            raise DivergenceDetected(
                f"Loss {current:.6g} at step {step + 1} exceeds"
                f" {divergence_factor:g} x initial {initial:.6g}"
            )

    _logger.debug("Gradient descent: loss %.6g -> %.6g in %d steps", initial, current, steps)
    return LearnerResult(
        NAME,
        w,
        {"loss": loss.as_dict(), "steps": steps, "step_size": step_size, "radius": radius},
        rounds=steps,
        queries_used=session.queries_used,
        final_loss=current,
    )
