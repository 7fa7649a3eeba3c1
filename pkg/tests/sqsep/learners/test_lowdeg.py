"""Unit tests for the non-adaptive low-degree learner."""

import math

import numpy as np
import pytest

from sqsep.cube import InstancePair, LabeledCloud
from sqsep.errors import AdaptivityViolation, QueryBudgetExceeded
from sqsep.learners import declared_queries, lowdeg_nonadaptive
from sqsep.sq import (
    AdversarialPairing,
    CloudEvaluator,
    HonestPolicy,
    SqOracleSession,
    constant,
)


def biased_cloud(rng, n=2000, dimension=5, bias=0.95):
    y = rng.choice([-1, 1], size=n)
    X = rng.choice([-1, 1], size=(n, dimension))
    keep = rng.random(n) < bias
    X[:, 0] = np.where(keep, y, -y)
    return LabeledCloud(X, y)


class TestLowDegree:
    """Test suite for lowdeg_nonadaptive."""

    def test_biased_coordinate(self):
        """Test error at most 0.1 when one coordinate agrees with the label 95% of the time."""
        rng = np.random.default_rng(0)
        cloud = biased_cloud(rng)
        session = SqOracleSession(0.0, HonestPolicy(CloudEvaluator(cloud)), adaptive=False)
        result = lowdeg_nonadaptive(session, 5, rng, max_degree=2)
        assert result.hypothesis.error(cloud) <= 0.1
        assert result.queries_used == 5 + math.comb(5, 2)

    def test_declared_upfront(self):
        """Test that nothing can be asked after the declared set is answered."""
        rng = np.random.default_rng(1)
        cloud = biased_cloud(rng, n=100)
        session = SqOracleSession(0.0, HonestPolicy(CloudEvaluator(cloud)), adaptive=False)
        lowdeg_nonadaptive(session, 5, rng, max_degree=1)
        with pytest.raises(AdaptivityViolation):
            session.submit(constant())

    def test_budget_fill(self):
        """Test that higher-degree parities fill exactly the remaining budget."""
        queries = declared_queries(10, 3, 25, np.random.default_rng(2))
        assert len(queries) == 25
        assert [q.descriptor for q in queries[:10]] == [f"y*x[{i}]" for i in range(10)]
        assert len({q.descriptor for q in queries}) == 25

    def test_budget_too_small(self):
        """Test QueryBudgetExceeded when the correlations alone do not fit."""
        rng = np.random.default_rng(3)
        cloud = biased_cloud(rng, n=50)
        session = SqOracleSession(
            0.0, HonestPolicy(CloudEvaluator(cloud)), budget=3, adaptive=False
        )
        with pytest.raises(QueryBudgetExceeded):
            lowdeg_nonadaptive(session, 5, rng)

    def test_pairing_oracle_hides_b(self, small_family):
        """Test identical hypotheses for b = 0 and b = 1 when the halves share one law."""
        tau = small_family.params.tau(4.0)
        rng = np.random.default_rng(4)
        pair = InstancePair(small_family.random_a(rng), small_family.pm1, small_family.pm1)
        weights = []
        for b in (0, 1):
            session = SqOracleSession(
                tau,
                AdversarialPairing.for_pair(pair, b, mode="exact"),
                budget=30,
                adaptive=False,
            )
            result = lowdeg_nonadaptive(session, 8, np.random.default_rng(5))
            assert set(session.branches()) == {"paired"}
            weights.append(result.hypothesis.w)
        assert np.array_equal(weights[0], weights[1])

    def test_canonical_pair_reveals_b(self, canonical_family):
        """Test that degree-1 correlations split the canonical pair at its tolerance."""
        tau = canonical_family.params.tau(4.0)
        rng = np.random.default_rng(4)
        pair = canonical_family.pair(canonical_family.random_a(rng))
        weights = []
        for b in (0, 1):
            session = SqOracleSession(
                tau,
                AdversarialPairing.for_pair(pair, b, mode="mc", rng=np.random.default_rng(6)),
                budget=60,
                adaptive=False,
            )
            result = lowdeg_nonadaptive(session, 24, np.random.default_rng(5))
            assert session.branches()[:24] == ["separated"] * 24
            weights.append(result.hypothesis.w)
        assert not np.array_equal(weights[0], weights[1])
