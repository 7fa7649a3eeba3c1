"""Constants for the sqsep plugin system."""

LEARNERS_GROUP = "sqsep.learners"
RANDOMIZERS_GROUP = "sqsep.randomizers"

SQSEP_ENTRY_POINTS = [
    LEARNERS_GROUP,
    RANDOMIZERS_GROUP,
]
