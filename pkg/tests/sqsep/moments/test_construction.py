"""Unit tests for ConstructionParams, construct_q and the rescaled pair."""

import math

import mpmath
import numpy as np
import pytest

from sqsep.errors import ParameterError
from sqsep.moments import (
    AtomicMeasure,
    ConstructionParams,
    MixtureP,
    audit_rescaled,
    construct_q,
    from_document,
    moments_p,
    ortho_basis,
    rescale_and_condition,
    rho,
    tail_bound,
    tail_mass,
    to_document,
)


CANONICAL = ConstructionParams(gamma=0.35, r=0.5)
STRESS = ConstructionParams.explicit(eta=0.1, gamma_prime=0.1 * 3**-1.5, k=3)


@pytest.fixture(scope="class")
def canonical_q():
    return construct_q(CANONICAL)


@pytest.fixture(scope="class")
def canonical_pair(canonical_q):
    return rescale_and_condition(MixtureP(CANONICAL.eta), canonical_q, CANONICAL)


class TestConstructionParams:
    """Test suite for ConstructionParams."""

    def test_derived_values(self):
        """Test eta, gamma', k and gamma~ for the canonical configuration."""
        assert CANONICAL.eta == pytest.approx(0.35**0.5)
        assert CANONICAL.gamma_prime == pytest.approx(0.35**0.8)
        assert CANONICAL.k == 1
        assert CANONICAL.gamma_tilde == pytest.approx(0.35**0.8 / 18)
        assert CANONICAL.min_dimension == math.ceil(0.35**-2.2)

    def test_canonical_regime_warnings(self):
        """Test that eta > 1/2 is reported as a warning, not an error."""
        warnings = CANONICAL.validate()
        assert any("eta" in w for w in warnings)

    def test_strict_regime_rejects(self):
        """Test that strict mode promotes regime warnings to errors."""
        with pytest.raises(ParameterError):
            CANONICAL.validate(strict_regime=True)

    def test_gamma_prime_above_limit_rejected(self):
        """Test rejection of gamma' > eta * k^(-3/2)."""
        with pytest.raises(ParameterError):
            ConstructionParams.explicit(eta=0.1, gamma_prime=0.2, k=1).validate()

    def test_stress_config_valid(self):
        """Test that the boundary stress configuration validates."""
        assert STRESS.validate() == []

    def test_invalid_gamma(self):
        """Test that gamma outside (0, 1) is rejected."""
        with pytest.raises(ParameterError):
            ConstructionParams(gamma=1.5, r=0.5)

    def test_tau_and_budget(self):
        """Test the oracle defaults derived from gamma^(-2r/5)."""
        exponent = 0.35**-0.2
        assert CANONICAL.tau(4.0) == pytest.approx(math.exp(-4.0 * exponent))
        assert CANONICAL.query_budget(5.0) == math.floor(math.exp(5.0 * exponent))

    def test_conditioning_dimension(self):
        """Test the smallest d whose conditioning tail stays below a quarter of tau."""
        tau = CANONICAL.tau(4.0)
        d = CANONICAL.conditioning_dimension(tau)
        assert 80_000 < d < 100_000
        assert math.exp(-d * CANONICAL.gamma_tilde**2 / 8) <= tau / 4
        assert math.exp(-(d - 1) * CANONICAL.gamma_tilde**2 / 8) > tau / 4
        with pytest.raises(ParameterError):
            CANONICAL.conditioning_dimension(0.0)


class TestConstructQ:
    """Test suite for construct_q."""

    @pytest.mark.parametrize("params", [CANONICAL, STRESS], ids=["canonical", "stress"])
    def test_matches_moments(self, params):
        """Test the 2k moments, weights and the atom at -gamma'."""
        q = construct_q(params)
        target = moments_p(params.eta, 2 * params.k)
        for j, expected in enumerate(target):
            assert abs(q.moment(j) - expected) <= 1e-8 * abs(expected)
        assert all(w >= 0 for w in q.weights)
        basis = ortho_basis(params.eta, params.k)
        expected_weight = rho(basis, -params.gamma_prime)
        assert abs(q.weight_at(-params.gamma_prime) - expected_weight) <= 1e-9
        assert float(expected_weight) >= 1 - 10 * params.eta
        assert len(q) == params.k + 1

    def test_two_atom_closed_form(self):
        """Test k = 1 against the closed-form two-atom solve."""
        params = ConstructionParams.explicit(eta=0.1, gamma_prime=0.05, k=1)
        q = construct_q(params)
        w0 = float(rho(ortho_basis(0.1, 1), -0.05))
        w1 = 1 - w0
        y = (0.1 - w0 * -0.05) / w1
        assert w0 * 0.05**2 + w1 * y**2 == pytest.approx(0.2, rel=1e-8)
        locations, weights = q.as_arrays()
        assert locations[1] == pytest.approx(y, rel=1e-9)
        assert weights[1] == pytest.approx(w1, rel=1e-9)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_weights_match_vandermonde_solve(self, k):
        """Test weights against an independent linear solve on the same nodes."""
        gamma_prime = 0.1 * k**-1.5
        q = construct_q(ConstructionParams.explicit(eta=0.1, gamma_prime=gamma_prime, k=k))
        nodes, weights = q.as_arrays()
        vandermonde = nodes[None, :] ** np.arange(k + 1)[:, None]
        target = np.array([float(m) for m in moments_p(0.1, k)])
        solved = np.linalg.solve(vandermonde, target)
        np.testing.assert_allclose(solved, weights, atol=1e-8)

    def test_discretized_fallback(self):
        """Test the least-squares path on the canonical configuration."""
        q = construct_q(CANONICAL, method="lstsq", tolerance=1e-6)
        basis = ortho_basis(CANONICAL.eta, CANONICAL.k)
        assert abs(
            q.weight_at(-CANONICAL.gamma_prime) - rho(basis, -CANONICAL.gamma_prime)
        ) <= 1e-9
        for j, expected in enumerate(moments_p(CANONICAL.eta, 2)):
            assert abs(q.moment(j) - expected) <= 1e-6 * abs(expected)

    def test_k_zero_rejected(self):
        """Test the documented k = 0 rejection."""
        with pytest.raises(ParameterError):
            construct_q(ConstructionParams.explicit(eta=0.1, gamma_prime=0.01, k=0))

    def test_unknown_method(self):
        """Test that an unknown method name raises."""
        with pytest.raises(ValueError):
            construct_q(CANONICAL, method="simplex")


class TestRescaleAndCondition:
    """Test suite for rescale_and_condition and audit_rescaled."""

    def test_point_mass_lands_on_gamma_tilde(self):
        """Test the affine image of the atom at 0."""
        k = CANONICAL.k
        image = AtomicMeasure.point_mass(0).affine(
            mpmath.mpf(1) / (8 * k + 1), CANONICAL.gamma_prime / (2 * (8 * k + 1))
        )
        assert float(image.locations[0]) == pytest.approx(CANONICAL.gamma_tilde, rel=1e-12)

    def test_supported_on_half_interval(self, canonical_pair):
        """Test that both conditioned measures live on [-1/2, 1/2]."""
        p_prime, q_prime = canonical_pair
        for measure in canonical_pair:
            lo, hi = measure.support_bounds()
            assert lo >= -0.5 and hi <= 0.5
        assert p_prime.conditioned_mass > 0
        assert q_prime.conditioned_mass < 1e-12

    def test_atoms_at_gamma_tilde(self, canonical_pair, canonical_q):
        """Test the atom locations of P' and Q'."""
        p_prime, q_prime = canonical_pair
        assert p_prime.weight_at(CANONICAL.gamma_tilde, 1e-12) > 0
        assert abs(
            q_prime.weight_at(-CANONICAL.gamma_tilde, 1e-12)
            - canonical_q.weight_at(-CANONICAL.gamma_prime)
        ) <= 1e-12

    def test_moment_gaps(self, canonical_pair):
        """Test moment closeness below and above degree k."""
        audit = audit_rescaled(*canonical_pair, CANONICAL, max_degree=8)
        assert audit.high_degree_ok
        for i, gap in enumerate(audit.moment_gaps, start=1):
            if i > CANONICAL.k:
                assert gap <= 2.0 ** (-i + 1)
        assert audit.low_degree_gap < 0.05
        assert audit.low_degree_gap <= 2 * math.exp(-audit.measured_c_decay * CANONICAL.k) + 1e-15
        assert 0 <= audit.base_tv <= 1

    def test_measured_constants_reported(self, canonical_pair):
        """Test that the measured constants satisfy the default ceiling C = 10."""
        audit = audit_rescaled(*canonical_pair, CANONICAL)
        assert audit.atom_mass_p >= 1 - 10 * CANONICAL.eta
        assert audit.atom_mass_q >= 1 - 10 * CANONICAL.eta
        assert audit.measured_c_rho == pytest.approx((1 - audit.rho_at_node) / CANONICAL.eta)

    @pytest.mark.parametrize("params", [CANONICAL, STRESS], ids=["canonical", "stress"])
    def test_tail_bound(self, params):
        """Test the tail of the pre-conditioned Q image against (4t)^(-2k)."""
        q = construct_q(params)
        scale = mpmath.mpf(1) / params.denominator
        image = q.affine(scale, params.gamma_prime / (2 * params.denominator))
        for t in (0.5, 0.75, 1.0):
            assert tail_mass(image, t) <= tail_bound(params.k, t)


class TestHybridMoments:
    """Test suite for the closed-form HybridMeasure moments."""

    def test_mixture_moments(self):
        """Test that the mixture measure reproduces eta * m!."""
        measure = MixtureP(0.1).as_measure()
        for m in range(6):
            assert abs(measure.moment(m) - moments_p(0.1, 5)[m]) < mpmath.mpf("1e-40")

    def test_closed_form_matches_quadrature(self, canonical_pair):
        """Test incomplete-gamma moments against adaptive quadrature."""
        p_prime, _ = canonical_pair
        for j in (1, 2, 5):
            quad = p_prime.expect(lambda x, j=j: x**j)
            assert abs(p_prime.moment(j) - quad) < 1e-10

    def test_sampler_mean(self, canonical_pair):
        """Test that the sampler is consistent with the first moment."""
        p_prime, _ = canonical_pair
        samples = p_prime.sample(np.random.default_rng(7), 200_000)
        assert samples.max() <= 0.5 + 1e-12
        assert samples.mean() == pytest.approx(float(p_prime.moment(1)), abs=3e-3)


class TestSerialization:
    """Test suite for decimal-string documents."""

    def test_documents_use_strings(self, canonical_q, canonical_pair):
        """Test that documents carry decimal strings and reload to equal measures."""
        doc = to_document(canonical_q)
        assert all(isinstance(v, str) for pair in doc["atoms"] for v in pair)
        reloaded = from_document(doc)
        for a, b in zip(reloaded.weights, canonical_q.weights):
            assert abs(a - b) < mpmath.mpf("1e-25")
        hybrid = from_document(to_document(canonical_pair[0]))
        assert abs(hybrid.moment(2) - canonical_pair[0].moment(2)) < mpmath.mpf("1e-25")
