"""Built-in local randomizer plugins and their lookup."""

from typing import Any, Dict, Optional
import logging
import math

from sqsep.plugins import (
    RANDOMIZERS_GROUP,
    PluginRegistry,
    RandomizerPlugin,
    get_plugin_registry,
)
from sqsep.sq.queries import StatQuery

from .randomizers import LocalRandomizer, Passthrough, RandomizedResponse


_logger = logging.getLogger("sqsep.console")


class RandomizedResponsePlugin(RandomizerPlugin):
    """Plugin wrapper for one-bit randomized response"""

    @property
    def name(self) -> str:
        return "randomized-response"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "Bernoulli rounding followed by binary randomized response"

    @property
    def config_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {"epsilon": {"type": "number", "exclusiveMinimum": 0}},
        }

    def initialize(self, config: Optional[Dict[str, Any]] = None) -> None:
        """Initialize the default epsilon from the given config."""
        self.epsilon = float((config or {}).get("epsilon", self.epsilon))
        self.initialized = True

    def create(self, query: StatQuery, epsilon: float) -> LocalRandomizer:
        return RandomizedResponse(query, epsilon)


class PassthroughPlugin(RandomizerPlugin):
    """Plugin wrapper for the noiseless channel"""

    epsilon = math.inf

    @property
    def name(self) -> str:
        return "passthrough"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "Unbiased rounding without privacy noise (epsilon = infinity)"

    def initialize(self, config: Optional[Dict[str, Any]] = None) -> None:
        self.initialized = True

    def create(self, query: StatQuery, epsilon: float = math.inf) -> LocalRandomizer:
        return Passthrough(query)


def get_randomizer_plugins() -> PluginRegistry:
    """Discover randomizer plugins, falling back to the built-ins."""
    registry = get_plugin_registry()
    if not registry.initialized(RANDOMIZERS_GROUP):
        _logger.debug("Registering local randomizer plugins")
        registry.discover_plugins(RANDOMIZERS_GROUP)
        registry.register_defaults(
            [RandomizedResponsePlugin(), PassthroughPlugin()], RANDOMIZERS_GROUP
        )
    return registry


def get_randomizer_plugin(name: str, config: Optional[Dict[str, Any]] = None) -> RandomizerPlugin:
    """
    Look up and initialize a randomizer plugin by name.

    Args:
        name: Plugin name (e.g. 'randomized-response')
        config: Plugin configuration, validated against its schema

    Returns:
        Initialized RandomizerPlugin

    Raises:
        ValueError: If the plugin is not found or the configuration is invalid
    """
    registry = get_randomizer_plugins()
    plugin = registry.get_plugin(name, RANDOMIZERS_GROUP)
    if plugin is None:
        _logger.error("Randomizer plugin '%s' not found", name)
        raise ValueError(f"Randomizer '{name}' not found.")
    if not plugin.initialized or config is not None:
        registry.initialize_plugin(name, RANDOMIZERS_GROUP, config)
    return plugin
