"""Registry of learner and local randomizer plugins.

Plugins arrive through the ``sqsep.learners`` and ``sqsep.randomizers``
entry point groups. Each group only accepts its own plugin type, so a
randomizer can never be handed to the separation harness as a learner.
"""

from typing import Any, Dict, Iterable, List, Optional, Type
from dataclasses import dataclass, field
from importlib.metadata import entry_points

import logging

from . import constants as const
from .plugin import BasePlugin, LearnerPlugin, RandomizerPlugin


_logger = logging.getLogger("sqsep.console")

GROUP_TYPES: Dict[str, Type[BasePlugin]] = {
    const.LEARNERS_GROUP: LearnerPlugin,
    const.RANDOMIZERS_GROUP: RandomizerPlugin,
}


@dataclass
class _Group:
    kind: Type[BasePlugin]
    members: Dict[str, BasePlugin] = field(default_factory=dict)
    discovered: bool = False


class PluginRegistry:
    """Plugins by group and name, filled by entry-point discovery or directly."""

    def __init__(self):
        self._groups = {name: _Group(GROUP_TYPES[name]) for name in const.SQSEP_ENTRY_POINTS}

    def _group(self, group: str) -> _Group:
        try:
            return self._groups[group]
        except KeyError:
            raise ValueError(
                f"Invalid plugin group: {group}, expected one of {sorted(self._groups)}"
            ) from None

    def initialized(self, group: str) -> bool:
        """Whether entry points of ``group`` have been scanned."""
        return self._group(group).discovered

    def discover_plugins(self, group: Optional[str] = None) -> None:
        """Load the entry points of one group, or of every group.

        Entry points that fail to load, or that resolve to the wrong plugin
        type, are logged and skipped.

        Args:
            group: Group to scan (e.g. 'sqsep.learners'), default all
        """
        for name in [group] if group else list(self._groups):
            slot = self._group(name)
            _logger.debug("Scanning entry points of %s", name)
            for ep in entry_points(group=name):
                # pylint: disable=broad-except
                try:
                    candidate = ep.load()()
                except Exception as e:
                    _logger.error("Cannot load plugin '%s': %s", ep.name, e, exc_info=True)
                    continue
                if not isinstance(candidate, slot.kind):
                    _logger.warning(
                        "Entry point '%s' is not a %s, skipped", ep.name, slot.kind.__name__
                    )
                    continue
                self.register_plugin(candidate, name)
            slot.discovered = True

    def register_defaults(self, plugins: Iterable[BasePlugin], group: str) -> None:
        """Add built-ins under names discovery left free.

        An uninstalled source tree has no entry point metadata; the built-in
        plugins still have to be reachable there.
        """
        members = self._group(group).members
        for plugin in plugins:
            if plugin.name not in members:
                self.register_plugin(plugin, group)

    def register_plugin(self, plugin: BasePlugin, group: str) -> None:
        """Store ``plugin`` under its name in ``group``.

        Raises:
            ValueError: If the group is unknown or holds another plugin type
        """
        slot = self._group(group)
        if not isinstance(plugin, slot.kind):
            raise ValueError(
                f"Plugin '{plugin.name}' is not a {slot.kind.__name__} and cannot join '{group}'"
            )
        if plugin.name in slot.members:
            _logger.warning("Replacing plugin '%s' in %s", plugin.name, group)
        slot.members[plugin.name] = plugin
        _logger.debug("Registered %s plugin '%s'", group, plugin.name)

    def get_plugin(self, name: str, group: str) -> Optional[BasePlugin]:
        """Plugin ``name`` of ``group``, or None."""
        slot = self._groups.get(group)
        return slot.members.get(name) if slot else None

    def get_plugins_by_group(self, group: str) -> Dict[str, BasePlugin]:
        """Copy of the name to plugin mapping of ``group``."""
        slot = self._groups.get(group)
        return dict(slot.members) if slot else {}

    def initialize_plugin(
        self,
        name: str,
        group: str,
        config: Optional[Dict[str, Any]] = None,
    ) -> BasePlugin:
        """Validate ``config`` against the plugin schema and initialize the plugin.

        Returns:
            The initialized plugin

        Raises:
            ValueError: If the plugin is unknown or ``config`` fails its schema
        """
        plugin = self.get_plugin(name, group)
        if plugin is None:
            raise ValueError(f"Plugin '{name}' not found in group '{group}'.")
        if not plugin.config_validate(config):
            raise ValueError(f"Invalid configuration for plugin '{name}'.")
        plugin.initialize(config)
        _logger.debug("Initialized %s plugin '%s'", group, name)
        return plugin

    def list_plugins(self, group: Optional[str] = None) -> List[Dict[str, str]]:
        """Name, version, description and group of every registered plugin."""
        names = [group] if group else list(self._groups)
        return [
            {
                "name": name,
                "version": plugin.version,
                "description": plugin.description,
                "group": group_name,
            }
            for group_name in names
            for name, plugin in self._group(group_name).members.items()
        ]


_registry: Optional[PluginRegistry] = None


def get_plugin_registry() -> PluginRegistry:
    """Process-wide registry, created on first use."""
    # pylint: disable=global-statement
    global _registry
    if _registry is None:
        _registry = PluginRegistry()
    return _registry


def reset_plugin_registry() -> None:
    """Drop the process-wide registry; the next lookup rediscovers plugins."""
    # pylint: disable=global-statement
    global _registry
    _registry = None
