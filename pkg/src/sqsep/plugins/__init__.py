"""Package for sqsep plugins system.

This module provides the plugin infrastructure to extend sqsep:
- Learners run against statistical-query oracle sessions
- Local randomizers for the non-interactive LDP protocol

Plugins are discovered via setuptools entry points and managed through
a central registry.
"""

from .plugin import BasePlugin, LearnerPlugin, RandomizerPlugin
from .registry import PluginRegistry, get_plugin_registry, reset_plugin_registry
from .constants import LEARNERS_GROUP, RANDOMIZERS_GROUP

__all__ = [
    "BasePlugin",
    "LearnerPlugin",
    "RandomizerPlugin",
    "PluginRegistry",
    "get_plugin_registry",
    "reset_plugin_registry",
    "LEARNERS_GROUP",
    "RANDOMIZERS_GROUP",
]
