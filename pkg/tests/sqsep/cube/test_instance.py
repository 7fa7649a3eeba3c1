"""Unit tests for the hard family, margins and exact distances."""

import numpy as np
import pytest

from sqsep.cube import (
    Channel,
    DiscreteDistribution,
    agreement_rate,
    build_family,
    build_instance,
    certificate_block,
    cube_domain,
    cube_points,
    instance_tv,
    margin_of,
    p1_negation_tv,
    point_index,
    product,
    push_forward,
    tv_exact,
)
from sqsep.errors import DimensionTooSmall, DomainMismatch, RowNotStochastic, ZeroWeightVector
from sqsep.moments import base_tv


def random_distribution(rng, n):
    return DiscreteDistribution(rng.dirichlet(np.ones(2**n)), cube_domain(n))


class TestHardInstance:
    """Test suite for HardInstance and InstancePair."""

    def test_target_equals_hidden_label(self, canonical_family):
        """Test f_{1,0}(x) = y on every sampled point."""
        a = np.ones(24, dtype=np.int8)
        inst = canonical_family.instance(a, 0)
        cloud = inst.sample(np.random.default_rng(5), 20_000)
        assert np.array_equal(inst.target(cloud.X), cloud.y)

    @pytest.mark.parametrize("b", [0, 1])
    def test_target_on_exact_support(self, small_family, b):
        """Test f_{a,b} = y over the full support for a random a."""
        a = small_family.random_a(np.random.default_rng(b))
        cloud = small_family.instance(a, b).exact_cloud()
        assert cloud.probs.sum() == pytest.approx(1.0)
        assert cloud.accuracy(small_family.instance(a, b).target) == pytest.approx(1.0)
        assert cloud.expect(lambda X, y: y) == pytest.approx(0.0, abs=1e-12)

    def test_translation_symmetry(self, canonical_family):
        """Test that D_{a,b} is the coordinatewise a-flip of D_{1,b}."""
        a = canonical_family.random_a(np.random.default_rng(11))
        ones = np.ones(24, dtype=np.int8)
        for b in (0, 1):
            flipped = canonical_family.instance(a, b).sample(np.random.default_rng(2), 500)
            plain = canonical_family.instance(ones, b).sample(np.random.default_rng(2), 500)
            assert np.array_equal(flipped.X, plain.X * a)
            assert np.array_equal(flipped.y, plain.y)

    def test_coupled_clouds_share_labels(self, canonical_family):
        """Test that the pair sampler couples the hidden draws."""
        pair = canonical_family.pair(canonical_family.random_a(np.random.default_rng(1)))
        first, second = pair.sample_clouds(np.random.default_rng(4), 100)
        assert np.array_equal(first.y, second.y)
        assert np.array_equal(first.X[:, :12], second.X[:, 12:] * pair.a[12:] * pair.a[:12])

    def test_dimension_requirement(self, canonical_params):
        """Test rejection of d below gamma^(-2-2r/5)."""
        with pytest.raises(DimensionTooSmall):
            build_instance(canonical_params, np.ones(8), 0)

    def test_agreement_matches_sampling(self, canonical_family):
        """Test the exact agreement probability of f_{a,0}, f_{a,1} against samples."""
        exact = agreement_rate(canonical_family.p1, canonical_family.pm1)
        a = canonical_family.random_a(np.random.default_rng(8))
        inst0 = canonical_family.instance(a, 0)
        inst1 = canonical_family.instance(a, 1)
        cloud = inst0.sample(np.random.default_rng(9), 40_000)
        empirical = np.mean(inst0.target(cloud.X) == inst1.target(cloud.X))
        assert empirical == pytest.approx(exact, abs=4 * 0.5 / np.sqrt(40_000))
        assert exact <= 10 * canonical_family.params.eta

    def test_certificate_records_agreement(self, canonical_family):
        """Test that the certificate block stores the agreement probability."""
        block = certificate_block(canonical_family)
        assert "disagreement" not in block
        assert block["agreement"] == agreement_rate(canonical_family.p1, canonical_family.pm1)
        assert 0.0 <= block["agreement"] <= 1.0


class TestMargin:
    """Test suite for margin_of."""

    def test_aligned_point(self):
        """Test the Cauchy-Schwarz equality case."""
        w = np.array([1.0, -1.0, 1.0])
        assert margin_of(w, w[None, :], np.array([1])) == pytest.approx(1.0)

    def test_antipodal_pair(self):
        """Test an antipodal pair with opposite labels."""
        X = np.array([[1, 1], [-1, -1]])
        assert margin_of(np.array([1.0, 0.0]), X, np.array([1, -1])) == pytest.approx(
            1 / np.sqrt(2)
        )

    def test_zero_vector(self):
        """Test that w = 0 is rejected."""
        with pytest.raises(ZeroWeightVector):
            margin_of(np.zeros(2), np.ones((1, 2)), np.array([1]))

    def test_support_margin(self, small_family):
        """Test margin of (a on the target half, 0 elsewhere) over the support."""
        a = small_family.random_a(np.random.default_rng(3))
        inst = small_family.instance(a, 0)
        cloud = inst.exact_cloud()
        support = cloud.probs > 0
        margin = margin_of(inst.weight_vector(), cloud.X[support], cloud.y[support])
        assert margin >= small_family.threshold / np.sqrt(2)


class TestDistances:
    """Test suite for tv_exact, product and push_forward."""

    def test_identical_and_disjoint(self):
        """Test the extreme values 0 and 1."""
        first = DiscreteDistribution(np.array([1.0, 0.0]), ("coin",))
        second = DiscreteDistribution(np.array([0.0, 1.0]), ("coin",))
        assert tv_exact(first, first) == 0.0
        assert tv_exact(first, second) == 1.0

    def test_domain_mismatch(self):
        """Test that distributions on different domains are rejected."""
        with pytest.raises(DomainMismatch):
            tv_exact(
                DiscreteDistribution(np.ones(4) / 4, cube_domain(2)),
                DiscreteDistribution(np.ones(4) / 4, ("other", 2)),
            )

    def test_product_subadditivity(self):
        """Test TV(PxQ, P'xQ') <= TV(P, P') + TV(Q, Q') on random pairs."""
        rng = np.random.default_rng(0)
        for _ in range(100):
            p, p2, q, q2 = (random_distribution(rng, 2) for _ in range(4))
            lhs = tv_exact(product(p, q), product(p2, q2))
            assert lhs <= tv_exact(p, p2) + tv_exact(q, q2) + 1e-12

    def test_product_concatenates_points(self):
        """Test that the first factor occupies the first coordinates."""
        first = DiscreteDistribution(np.array([0.0, 1.0]), cube_domain(1))
        second = DiscreteDistribution(np.array([1.0, 0.0]), cube_domain(1))
        joint = product(first, second)
        assert joint.domain == cube_domain(2)
        assert joint.pmf[point_index(np.array([-1, 1]))[0]] == 1.0

    def test_data_processing(self):
        """Test that random channels never increase TV."""
        rng = np.random.default_rng(1)
        for _ in range(100):
            p, q = random_distribution(rng, 3), random_distribution(rng, 3)
            channel = Channel.random(rng, cube_domain(3), 8)
            assert tv_exact(push_forward(p, channel), push_forward(q, channel)) <= tv_exact(
                p, q
            ) + 1e-12

    def test_identity_and_constant_channels(self):
        """Test that identity preserves and a constant channel collapses TV."""
        rng = np.random.default_rng(2)
        p, q = random_distribution(rng, 2), random_distribution(rng, 2)
        identity = Channel.identity(cube_domain(2), 4)
        constant = Channel.constant(cube_domain(2), 4)
        assert tv_exact(push_forward(p, identity), push_forward(q, identity)) == pytest.approx(
            tv_exact(p, q)
        )
        assert tv_exact(push_forward(p, constant), push_forward(q, constant)) == 0.0

    def test_row_not_stochastic(self):
        """Test rejection of a matrix with a row summing to 0.9."""
        with pytest.raises(RowNotStochastic):
            Channel(np.array([[0.5, 0.4], [0.0, 1.0]]), "x", "x")

    def test_coarsening_on_lifts(self, canonical_params):
        """Test a merge channel on (P_1, -P_-1) at d=6."""
        family = build_family(canonical_params, 6, check_dimension=False)
        first = family.p1.distribution()
        second = family.pm1.distribution().negate()
        merge = Channel.merge(cube_domain(6), 64, source=5, target=0)
        before = tv_exact(first, second)
        assert tv_exact(push_forward(first, merge), push_forward(second, merge)) <= before + 1e-12

    def test_count_tv_equals_enumerated_tv(self, small_family):
        """Test the count-class TV against full enumeration."""
        enumerated = tv_exact(
            small_family.p1.distribution(), small_family.pm1.distribution().negate()
        )
        assert p1_negation_tv(small_family.p1, small_family.pm1) == pytest.approx(
            enumerated, abs=1e-12
        )

    def test_tv_chain(self, canonical_family):
        """Test TV(D_a0, D_a1) <= 2 TV(P_1, -P_-1) <= 2 (TV(P', -Q') + conditioned mass)."""
        p1, pm1 = canonical_family.p1, canonical_family.pm1
        lifted = p1_negation_tv(p1, pm1)
        assert instance_tv(p1, pm1) <= 2 * lifted + 1e-12
        base = float(base_tv(canonical_family.p_prime, canonical_family.q_prime.negate()))
        assert lifted <= base + p1.conditioned_mass + 1e-12
        assert lifted <= 10 * canonical_family.params.eta

    def test_instance_tv_enumerated(self, small_family):
        """Test count-class instance TV against the enumerated point marginals."""
        a = np.ones(8, dtype=np.int8)
        marginals = []
        for b in (0, 1):
            joint = small_family.instance(a, b).label_conditioned()
            marginals.append(
                DiscreteDistribution((joint.pmf + joint.pmf[::-1]) / 2, joint.domain)
            )
        first, second = marginals
        assert instance_tv(small_family.p1, small_family.pm1) == pytest.approx(
            tv_exact(first, second), abs=1e-12
        )

    def test_cube_points_roundtrip(self):
        """Test that point_index inverts cube_points."""
        points = cube_points(5)
        assert np.array_equal(point_index(points), np.arange(32))
