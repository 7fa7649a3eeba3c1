"""Package for sqsep sq: statistical queries, oracle sessions and hardness sweeps."""

from .queries import (
    StatQuery,
    constant,
    label,
    correlation,
    parity,
    halfspace_error,
    margin_mistake,
    perceptron_update,
    from_function,
    restrict_label,
)
from .oracle import (
    SqEstimate,
    PolicyAnswer,
    BasePolicy,
    InstanceEvaluator,
    CloudEvaluator,
    HonestPolicy,
    AdversarialPairing,
    QueryRecord,
    SqOracleSession,
    analytic_value,
    hoeffding_half_width,
    sq_value,
    adversarial_answer,
)
from .hardness import (
    VarianceReport,
    SweepReport,
    TensorGapReport,
    gap_table,
    gap_at,
    variance_identity_check,
    chebyshev_sweep,
    union_sweep,
    tensor_gap_bound_check,
)

__all__ = [
    "StatQuery",
    "constant",
    "label",
    "correlation",
    "parity",
    "halfspace_error",
    "margin_mistake",
    "perceptron_update",
    "from_function",
    "restrict_label",
    "SqEstimate",
    "PolicyAnswer",
    "BasePolicy",
    "InstanceEvaluator",
    "CloudEvaluator",
    "HonestPolicy",
    "AdversarialPairing",
    "QueryRecord",
    "SqOracleSession",
    "analytic_value",
    "hoeffding_half_width",
    "sq_value",
    "adversarial_answer",
    "VarianceReport",
    "SweepReport",
    "TensorGapReport",
    "gap_table",
    "gap_at",
    "variance_identity_check",
    "chebyshev_sweep",
    "union_sweep",
    "tensor_gap_bound_check",
]
