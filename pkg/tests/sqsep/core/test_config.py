"""Unit tests for configuration loading, merging and validation."""

import json

import pytest

from sqsep.core.config import SqsepConfig, initialize
from sqsep.errors import ConfigurationError


class TestSqsepConfig:
    """Test suite for SqsepConfig class."""

    def test_default_config_values(self):
        """Test that default config has the documented values."""
        config = SqsepConfig.get_default_config()

        assert config["construction"]["gamma"] == 0.35
        assert config["construction"]["r"] == 0.5
        assert config["cube"]["d"] == 12
        assert config["oracle"]["c1"] == 5.0
        assert config["oracle"]["c2"] == 4.0
        assert config["ldp"]["epsilon"] == 1.0
        assert config["ldp"]["n_users"] == 10000
        assert config["experiment"]["n_a"] == 200
        assert config["experiment"]["samples"] == 4000
        assert config["experiment"]["seed"] == 0
        assert config["ceilings"] == {
            "C": 10,
            "lowdeg_max_accuracy": 0.55,
            "perceptron_min_accuracy": 0.9,
            "min_gap": 0.3,
            "indistinguishable_fraction": 0.95,
        }
        assert config["output"]["directory"] == "sqsep-out"

    def test_init_with_no_config_path(self):
        """Test initialization with no config path uses defaults."""
        config = SqsepConfig()

        assert config.config == SqsepConfig.get_default_config()
        assert config.path is None

    def test_init_with_nonexistent_file(self):
        """Test initialization with non-existent file uses defaults."""
        config = SqsepConfig(config_path="/path/to/nonexistent/file.json")

        assert config.config == SqsepConfig.get_default_config()

    def test_partial_file_merges_over_defaults(self, tmp_path):
        """Test that a file only needs the keys it changes."""
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"construction": {"gamma": 0.3}}))

        config = SqsepConfig(config_path=str(config_file))

        assert config.get("construction.gamma") == 0.3
        assert config.get("construction.r") == 0.5
        assert config.get("cube.d") == 12

    def test_invalid_json_file(self, tmp_path):
        """Test that a malformed file is reported as a configuration error."""
        config_file = tmp_path / "broken.json"
        config_file.write_text("{ not json")

        with pytest.raises(ConfigurationError):
            SqsepConfig(config_path=str(config_file))

    def test_get_nested_key(self):
        """Test getting nested keys with dot notation."""
        config = SqsepConfig()

        assert config.get("oracle.c2") == 4.0
        assert config.get("learners.perceptron.max_rounds") == 200
        assert config.get("nonexistent.nested.key") is None
        assert config.get("llm.nonexistent", 42) == 42

    def test_merged_flags_win(self):
        """Test that overrides win and unset flags keep the current value."""
        config = SqsepConfig()

        merged = config.merged({"construction.gamma": 0.3, "cube.d": None, "ldp": {"epsilon": 2.0}})

        assert merged.get("construction.gamma") == 0.3
        assert merged.get("cube.d") == 12
        assert merged.get("ldp.epsilon") == 2.0
        assert merged.get("ldp.n_users") == 10000
        assert config.get("construction.gamma") == 0.35

    def test_derived_oracle_values(self):
        """Test tau and the query budget at the canonical configuration."""
        config = SqsepConfig()
        params = config.params()

        assert params.k == 1
        assert config.tau() == pytest.approx(params.tau(4.0))
        assert config.query_budget() == 477

    def test_explicit_oracle_values(self):
        """Test that explicit tau and budget override c1 and c2."""
        config = SqsepConfig().merged({"oracle.tau": 0.01, "oracle.query_budget": 50})

        assert config.tau() == 0.01
        assert config.query_budget() == 50

    def test_config_hash(self):
        """Test that the hash is stable and sensitive to every value."""
        first, second = SqsepConfig(), SqsepConfig()

        assert first.config_hash() == second.config_hash()
        assert len(first.config_hash()) == 64
        assert first.merged({"experiment.seed": 1}).config_hash() != first.config_hash()


class TestValidate:
    """Test suite for SqsepConfig.validate."""

    def test_canonical_config_is_valid(self):
        """Test that the defaults validate with the eta > 1/2 regime warning."""
        warnings = SqsepConfig().validate()

        assert any("eta" in warning for warning in warnings)

    def test_schema_violation(self):
        """Test that a wrongly typed value is rejected with its location."""
        config = SqsepConfig().merged({"ldp.n_users": "many"})

        with pytest.raises(ConfigurationError, match="ldp.n_users"):
            config.validate()

    def test_gamma_prime_above_limit(self):
        """Test rejection when gamma' exceeds eta * k^(-3/2)."""
        config = SqsepConfig().merged({"construction.k": 3})

        with pytest.raises(ConfigurationError, match="exceeds"):
            config.validate()

    def test_gamma_prime_above_half(self):
        """Test rejection when gamma' leaves (0, 1/2]."""
        config = SqsepConfig().merged({"construction.gamma": 0.9, "construction.r": 0.1})

        with pytest.raises(ConfigurationError):
            config.validate()

    def test_dimension_too_small(self):
        """Test rejection of a cube below the dimension requirement."""
        config = SqsepConfig().merged({"cube.d": 4})

        with pytest.raises(ConfigurationError, match="cube.d"):
            config.validate()
        config.merged({"cube.check_dimension": False}).validate()

    def test_strict_regime(self):
        """Test that strict mode turns regime warnings into errors."""
        config = SqsepConfig().merged({"construction.strict_regime": True})

        with pytest.raises(ConfigurationError):
            config.validate()


class TestInitialize:
    """Test suite for config discovery."""

    def test_initialize_without_config_file(self, tmp_path, monkeypatch):
        """Test that discovery falls back to defaults."""
        monkeypatch.chdir(tmp_path)

        config = initialize()

        assert config.path is None
        assert config.config == SqsepConfig.get_default_config()

    def test_initialize_with_sqsep_config_json(self, tmp_path, monkeypatch):
        """Test discovery of sqsep.config.json."""
        monkeypatch.chdir(tmp_path)
        (tmp_path / "sqsep.config.json").write_text(json.dumps({"cube": {"d": 14}}))

        config = initialize()

        assert config.path.endswith("sqsep.config.json")
        assert config.get("cube.d") == 14

    def test_initialize_prefers_sqsep_json(self, tmp_path, monkeypatch):
        """Test that sqsep.json wins over sqsep.config.json."""
        monkeypatch.chdir(tmp_path)
        (tmp_path / "sqsep.json").write_text(json.dumps({"cube": {"d": 16}}))
        (tmp_path / "sqsep.config.json").write_text(json.dumps({"cube": {"d": 14}}))

        config = initialize()

        assert config.path.endswith("sqsep.json")
        assert config.get("cube.d") == 16
