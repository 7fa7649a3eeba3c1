"""Shared fixtures: hard families at the canonical and at enumerable dimensions."""

import numpy as np
import pytest

from sqsep.cube import build_family
from sqsep.moments import ConstructionParams


CANONICAL = ConstructionParams(gamma=0.35, r=0.5)


@pytest.fixture(scope="session")
def canonical_params():
    """The desk-scale configuration gamma=0.35, r=0.5."""
    return CANONICAL


@pytest.fixture(scope="session")
def canonical_family():
    """Hard family at d=12."""
    return build_family(CANONICAL, 12)


@pytest.fixture(scope="session")
def small_family():
    """Hard family at d=4, below the dimension requirement, enumerable jointly."""
    return build_family(CANONICAL, 4, check_dimension=False)


@pytest.fixture(scope="session")
def tiny_family():
    """Hard family at d=3 for exhaustive sweeps over a."""
    return build_family(CANONICAL, 3, check_dimension=False)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
