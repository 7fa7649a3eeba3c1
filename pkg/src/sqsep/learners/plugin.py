"""Built-in learner plugins and their lookup."""

from typing import Any, Dict, Optional
import logging

import numpy as np

from sqsep.plugins import LEARNERS_GROUP, LearnerPlugin, PluginRegistry, get_plugin_registry
from sqsep.sq import SqOracleSession

from .hypothesis import LearnerResult
from .lowdeg import lowdeg_nonadaptive
from .perceptron import perceptron_sq
from .random_halfspace import THRESHOLD_MODES, candidate_count, random_halfspace_learner


_logger = logging.getLogger("sqsep.console")


class PerceptronLearnerPlugin(LearnerPlugin):
    """Plugin wrapper for the interactive SQ Perceptron"""

    def __init__(self):
        self.options = {"max_rounds": 200, "target": 0.05}

    @property
    def name(self) -> str:
        return "perceptron"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "Interactive Perceptron with expected updates from statistical queries"

    @property
    def adaptive(self) -> bool:
        return True

    @property
    def config_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "max_rounds": {"type": "integer", "minimum": 1},
                "target": {"type": "number", "minimum": 0, "maximum": 1},
            },
        }

    def initialize(self, config: Optional[Dict[str, Any]] = None) -> None:
        self.options.update(config or {})
        self.initialized = True

    def learn(
        self,
        session: SqOracleSession,
        dimension: int,
        gamma: float,
        rng: np.random.Generator,
    ) -> LearnerResult:
        return perceptron_sq(
            session,
            dimension,
            gamma,
            max_rounds=self.options["max_rounds"],
            target=self.options["target"],
        )


class RandomHalfspaceLearnerPlugin(LearnerPlugin):
    """Plugin wrapper for the best-of-m random halfspace learner"""

    def __init__(self):
        self.options = {"eps": 0.2, "c": 1.0, "max_candidates": 10000, "threshold_mode": "error"}

    @property
    def name(self) -> str:
        return "random-halfspace"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "Non-adaptive selection among random Gaussian halfspaces"

    @property
    def adaptive(self) -> bool:
        return False

    @property
    def config_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "eps": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "c": {"type": "number", "exclusiveMinimum": 0},
                "max_candidates": {"type": "integer", "minimum": 1},
                "threshold_mode": {"type": "string", "enum": list(THRESHOLD_MODES)},
            },
        }

    def initialize(self, config: Optional[Dict[str, Any]] = None) -> None:
        self.options.update(config or {})
        self.initialized = True

    def query_budget(self, dimension: int, gamma: float) -> Optional[int]:
        count = candidate_count(gamma, self.options["eps"], self.options["c"])
        return min(count, self.options["max_candidates"])

    def learn(
        self,
        session: SqOracleSession,
        dimension: int,
        gamma: float,
        rng: np.random.Generator,
    ) -> LearnerResult:
        m = self.query_budget(dimension, gamma)
        if session.budget is not None:
            m = min(m, session.budget - session.queries_used)
        return random_halfspace_learner(
            session,
            dimension,
            m,
            rng,
            self.options["threshold_mode"],
        )


class LowDegreeLearnerPlugin(LearnerPlugin):
    """Plugin wrapper for the non-adaptive low-degree baseline"""

    def __init__(self):
        self.options = {"max_degree": 3}

    @property
    def name(self) -> str:
        return "lowdeg"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "Non-adaptive learner from declared low-degree label correlations"

    @property
    def adaptive(self) -> bool:
        return False

    @property
    def config_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {"max_degree": {"type": "integer", "minimum": 1}},
        }

    def initialize(self, config: Optional[Dict[str, Any]] = None) -> None:
        self.options.update(config or {})
        self.initialized = True

    def learn(
        self,
        session: SqOracleSession,
        dimension: int,
        gamma: float,
        rng: np.random.Generator,
    ) -> LearnerResult:
        return lowdeg_nonadaptive(session, dimension, rng, self.options["max_degree"])


def get_learner_plugins() -> PluginRegistry:
    """Discover learner plugins, falling back to the built-ins."""
    registry = get_plugin_registry()
    if not registry.initialized(LEARNERS_GROUP):
        _logger.debug("Registering learner plugins")
        registry.discover_plugins(LEARNERS_GROUP)
        registry.register_defaults(
            [PerceptronLearnerPlugin(), RandomHalfspaceLearnerPlugin(), LowDegreeLearnerPlugin()],
            LEARNERS_GROUP,
        )
    return registry


def get_learner_plugin(name: str, config: Optional[Dict[str, Any]] = None) -> LearnerPlugin:
    """
    Look up and initialize a learner plugin by name.

    Args:
        name: Plugin name (e.g. 'perceptron')
        config: Plugin configuration, validated against its schema

    Returns:
        Initialized LearnerPlugin

    Raises:
        ValueError: If the plugin is not found or the configuration is invalid
    """
    registry = get_learner_plugins()
    plugin = registry.get_plugin(name, LEARNERS_GROUP)
    if plugin is None:
        _logger.error("Learner plugin '%s' not found", name)
        raise ValueError(f"Learner '{name}' not found.")
    if not plugin.initialized or config is not None:
        registry.initialize_plugin(name, LEARNERS_GROUP, config)
    return plugin
