"""Package for sqsep core."""

from sqsep.core.config import SqsepConfig, conf
from sqsep.core.orchestrator import ExperimentOrchestrator

__all__ = ["SqsepConfig", "conf", "ExperimentOrchestrator"]
