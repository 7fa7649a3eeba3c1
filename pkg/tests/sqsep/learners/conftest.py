"""Fixtures for learner tests: separable point sets on the unit sphere."""

import numpy as np
import pytest

from sqsep.cube import LabeledCloud


def separable_cloud(rng, n, dimension, gamma):
    """n unit vectors with |<w*, x>| >= gamma, labeled by sign(<w*, x>)."""
    w_star = rng.standard_normal(dimension)
    w_star /= np.linalg.norm(w_star)
    points = []
    while len(points) < n:
        x = rng.standard_normal(dimension)
        x /= np.linalg.norm(x)
        if abs(x @ w_star) >= gamma:
            points.append(x)
    X = np.array(points)
    y = np.where(X @ w_star >= 0, 1, -1)
    return LabeledCloud(X, y), w_star


@pytest.fixture
def make_separable():
    return separable_cloud
