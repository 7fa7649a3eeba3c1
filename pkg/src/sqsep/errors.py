"""Exceptions raised by sqsep.

Library code raises these; only the CLI turns them into exit codes.
"""


class SqsepError(Exception):
    """Base class for all sqsep errors."""


class ParameterError(SqsepError, ValueError):
    """Construction parameters violate a hard constraint."""


class InvalidMeasure(SqsepError, ValueError):
    """A measure does not sum to one or has repeated atoms."""


class OrthonormalityFailure(SqsepError, ArithmeticError):
    """Computed orthogonal polynomials fail the orthonormality check."""


class MomentMatchFailure(SqsepError, ArithmeticError):
    """A constructed measure does not reproduce the target moments."""


class NegativeWeight(SqsepError, ValueError):
    """A constructed measure carries a negative weight."""


class ConditioningMassLoss(SqsepError, ArithmeticError):
    """Conditioning removed more mass than the tail bound allows."""


class BiasOutOfRange(SqsepError, ValueError):
    """A bias measure puts mass outside [-1, 1]."""


class DimensionTooSmall(SqsepError, ValueError):
    """The cube dimension is below the required minimum."""


class ZeroWeightVector(SqsepError, ValueError):
    """A margin was requested for the zero vector."""


class DomainMismatch(SqsepError, ValueError):
    """Two distributions are defined over different domains."""


class RowNotStochastic(SqsepError, ValueError):
    """A channel matrix row is negative or does not sum to one."""


class EnumerationBudgetExceeded(SqsepError, RuntimeError):
    """Exact enumeration would exceed the configured point budget."""


class QueryBudgetExceeded(SqsepError, RuntimeError):
    """An oracle session ran out of queries."""


class AdaptivityViolation(SqsepError, RuntimeError):
    """A query was submitted after answers were observed."""


class PrivacyViolation(SqsepError, RuntimeError):
    """A local randomizer exceeds its claimed privacy parameter."""


class BudgetExceeded(SqsepError, RuntimeError):
    """A user's privacy budget was overspent."""


class SampleReuse(SqsepError, RuntimeError):
    """A user sample was accessed more than once."""


class NoProgress(SqsepError, RuntimeError):
    """An iterative learner stopped without reaching its target.

    Attributes:
        result: Last learner state, when available
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class DivergenceDetected(SqsepError, RuntimeError):
    """An optimizer's loss grew past the divergence limit."""


class CheckFailed(SqsepError, RuntimeError):
    """A certificate or experiment check failed its ceiling."""


class ConfigurationError(SqsepError, ValueError):
    """The resolved configuration does not satisfy its schema or constraints."""
