"""Report records shared by the orchestrated commands."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional


SEPARATION_COLUMNS = (
    "learner",
    "a_index",
    "b",
    "adaptive",
    "oracle",
    "accuracy",
    "queries",
    "rounds",
    "status",
    "separated_answers",
    "indistinguishable",
    "config_hash",
    "version",
)

SWEEP_COLUMNS = (
    "gamma",
    "r",
    "valid",
    "eta",
    "gamma_prime",
    "k",
    "gamma_tilde",
    "min_dimension",
    "tau",
    "query_budget",
    "rho_at_node",
    "measured_c_rho",
    "measured_c_decay",
    "low_degree_gap",
    "base_tv",
    "warnings",
    "error",
    "config_hash",
    "version",
)


@dataclass
class CommandReport:
    """Outcome of one orchestrated command.

    Attributes:
        command: Command name
        path: Main output file
        checks: Named pass/fail checks against the configured ceilings
        summary: Headline values logged by the CLI
    """

    command: str
    path: Path
    checks: Dict[str, bool] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failed(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]


@dataclass
class SeparationTask:
    """Rows of one translation vector a, for every learner and both b."""

    index: int
    rows: List[Dict[str, Any]] = field(default_factory=list)
    indistinguishable: Dict[str, Optional[bool]] = field(default_factory=dict)
