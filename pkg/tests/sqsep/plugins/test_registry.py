"""Unit tests for the plugin registry."""

import pytest

from sqsep.ldp.plugin import PassthroughPlugin, RandomizedResponsePlugin
from sqsep.plugins import (
    LEARNERS_GROUP,
    RANDOMIZERS_GROUP,
    PluginRegistry,
    get_plugin_registry,
    reset_plugin_registry,
)


class TestPluginRegistry:
    """Test suite for PluginRegistry."""

    def test_groups_start_uninitialized(self):
        """Test that no group is marked discovered on creation."""
        registry = PluginRegistry()
        assert not registry.initialized(LEARNERS_GROUP)
        assert not registry.initialized(RANDOMIZERS_GROUP)
        assert registry.list_plugins() == []

    def test_register_and_get(self):
        """Test registering a plugin and reading it back."""
        registry = PluginRegistry()
        plugin = RandomizedResponsePlugin()
        registry.register_plugin(plugin, RANDOMIZERS_GROUP)
        assert registry.get_plugin("randomized-response", RANDOMIZERS_GROUP) is plugin
        assert registry.get_plugin("randomized-response", LEARNERS_GROUP) is None

    def test_register_wrong_group(self):
        """Test that a randomizer cannot be registered as a learner."""
        registry = PluginRegistry()
        with pytest.raises(ValueError):
            registry.register_plugin(PassthroughPlugin(), LEARNERS_GROUP)

    def test_register_invalid_group(self):
        """Test rejection of an unknown group."""
        registry = PluginRegistry()
        with pytest.raises(ValueError):
            registry.register_plugin(PassthroughPlugin(), "sqsep.unknown")

    def test_register_defaults_keeps_existing(self):
        """Test that defaults do not overwrite a registered plugin."""
        registry = PluginRegistry()
        first = PassthroughPlugin()
        registry.register_plugin(first, RANDOMIZERS_GROUP)
        registry.register_defaults([PassthroughPlugin()], RANDOMIZERS_GROUP)
        assert registry.get_plugin("passthrough", RANDOMIZERS_GROUP) is first

    def test_initialize_plugin(self):
        """Test initialization with a valid configuration."""
        registry = PluginRegistry()
        registry.register_plugin(RandomizedResponsePlugin(), RANDOMIZERS_GROUP)
        plugin = registry.initialize_plugin(
            "randomized-response", RANDOMIZERS_GROUP, {"epsilon": 2.0}
        )
        assert plugin.initialized
        assert plugin.epsilon == 2.0

    def test_initialize_missing_plugin(self):
        """Test ValueError when initializing an unknown plugin."""
        with pytest.raises(ValueError):
            PluginRegistry().initialize_plugin("missing", RANDOMIZERS_GROUP)

    def test_list_plugins(self):
        """Test plugin metadata listing."""
        registry = PluginRegistry()
        registry.register_plugin(PassthroughPlugin(), RANDOMIZERS_GROUP)
        assert registry.list_plugins(RANDOMIZERS_GROUP) == [
            {
                "name": "passthrough",
                "version": "1.0.0",
                "description": PassthroughPlugin().description,
                "group": RANDOMIZERS_GROUP,
            }
        ]

    def test_global_registry(self):
        """Test that the global registry is shared until reset."""
        reset_plugin_registry()
        registry = get_plugin_registry()
        assert get_plugin_registry() is registry
        reset_plugin_registry()
        assert get_plugin_registry() is not registry
        reset_plugin_registry()
