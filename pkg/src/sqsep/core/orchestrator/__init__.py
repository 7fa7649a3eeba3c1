"""Package for sqsep Orchestrator."""

from .orchestrator import ExperimentOrchestrator, separation_checks
from .reports import CommandReport, SeparationTask

__all__ = ["ExperimentOrchestrator", "CommandReport", "SeparationTask", "separation_checks"]
