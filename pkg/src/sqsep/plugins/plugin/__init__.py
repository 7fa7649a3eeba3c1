"""Package for sqsep plugins.plugin."""

from .plugin import BasePlugin
from .learner_plugin import LearnerPlugin
from .randomizer_plugin import RandomizerPlugin

__all__ = [
    "BasePlugin",
    "LearnerPlugin",
    "RandomizerPlugin",
]
