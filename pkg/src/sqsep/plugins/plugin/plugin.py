"""Common base of learner and randomizer plugins."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

from jsonschema import validate, ValidationError


OPEN_SCHEMA: Dict[str, Any] = {"type": "object"}


class BasePlugin(ABC):
    """A named, versioned component configured from a JSON object.

    Options come from the ``learners.<name>`` section of the sqsep
    configuration, or from the command being run, and are checked against
    ``config_schema`` before ``initialize`` sees them.
    """

    initialized: bool = False

    @property
    @abstractmethod
    def name(self) -> str:
        """Registry key, e.g. 'perceptron' or 'randomized-response'"""

    @property
    @abstractmethod
    def version(self) -> str:
        """Semantic version of the plugin"""

    @property
    def description(self) -> Optional[str]:
        """One-line summary shown by ``sqsep plugins``"""
        return None

    @property
    def config_schema(self) -> Dict[str, Any]:
        """JSON schema of the options; any object by default."""
        return OPEN_SCHEMA

    def config_validate(self, config: Optional[Dict[str, Any]]) -> bool:
        """Whether ``config`` (None means no options) satisfies ``config_schema``."""
        if config is None:
            return True
        try:
            validate(instance=config, schema=self.config_schema)
        except ValidationError:
            return False
        return True

    @abstractmethod
    def initialize(self, config: Optional[Dict[str, Any]] = None) -> None:
        """Apply validated options and mark the plugin ready.

        Raises:
            ValueError: If the options are inconsistent beyond their schema
        """
