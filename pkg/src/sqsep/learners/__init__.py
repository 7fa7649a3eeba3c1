"""Learners for halfspaces over statistical-query sessions, and margin losses."""

from .hypothesis import Hypothesis, LearnerResult
from .losses import (
    BridgeReport,
    HingeReport,
    LossGridReport,
    LossSpec,
    err_loss_bridge,
    hinge_error_bound,
    hinge_loss,
    loss_grid_check,
    phi_gamma,
    phi_gamma_derivative,
    scaled_loss_for,
    unit_rows,
)
from .perceptron import perceptron_sq
from .random_halfspace import candidate_count, draw_candidates, random_halfspace_learner
from .lowdeg import declared_queries, lowdeg_nonadaptive
from .gradient import loss_gradient_query, loss_value_query, sq_gradient_descent

__all__ = [
    "Hypothesis",
    "LearnerResult",
    "BridgeReport",
    "HingeReport",
    "LossGridReport",
    "LossSpec",
    "err_loss_bridge",
    "hinge_error_bound",
    "hinge_loss",
    "loss_grid_check",
    "phi_gamma",
    "phi_gamma_derivative",
    "scaled_loss_for",
    "unit_rows",
    "perceptron_sq",
    "candidate_count",
    "draw_candidates",
    "random_halfspace_learner",
    "declared_queries",
    "lowdeg_nonadaptive",
    "loss_gradient_query",
    "loss_value_query",
    "sq_gradient_descent",
]
