"""Local randomizer plugin interface for sqsep plugins."""

from abc import abstractmethod
from typing import TYPE_CHECKING

from .plugin import BasePlugin

if TYPE_CHECKING:
    from sqsep.ldp.randomizers import LocalRandomizer
    from sqsep.sq.queries import StatQuery


class RandomizerPlugin(BasePlugin):
    """
    Base class for local randomizer plugins.

    Randomizer plugins turn a statistical query and a privacy parameter into
    a LocalRandomizer whose kernel is available in closed form for audits.
    """

    epsilon: float = 1.0

    @abstractmethod
    def create(self, query: "StatQuery", epsilon: float) -> "LocalRandomizer":
        """
        Build a randomizer answering ``query`` at privacy level ``epsilon``.

        Args:
            query: Statistical query evaluated on the user's sample
            epsilon: Privacy parameter
        """
