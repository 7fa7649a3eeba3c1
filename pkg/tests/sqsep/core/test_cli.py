"""Tests for the sqsep command-line interface."""

import csv
import json

import pytest
from click.testing import CliRunner

from sqsep.core.cli import EXIT_CHECK_FAILED, EXIT_CONFIG_INVALID, EXIT_OK, cli
from sqsep.plugins import reset_plugin_registry


@pytest.fixture(autouse=True)
def fresh_registry():
    reset_plugin_registry()
    yield
    reset_plugin_registry()


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def small_config_file(tmp_path):
    path = tmp_path / "sqsep.json"
    path.write_text(
        json.dumps(
            {
                "experiment": {
                    "n_a": 2,
                    "samples": 200,
                    "workers": 2,
                    "require_certificate": False,
                },
                "learners": {"perceptron": {"max_rounds": 3}},
                "ldp": {"n_users": 2000},
            }
        )
    )
    return path


class TestConfigCommand:
    """Test suite for the config command."""

    def test_show_key(self, runner):
        """Test that showing a single key succeeds."""
        result = runner.invoke(cli, ["config", "--key", "construction.gamma"])
        assert result.exit_code == EXIT_OK

    def test_invalid_config_file(self, runner, tmp_path):
        """Test that a malformed configuration file exits with code 2."""
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        result = runner.invoke(cli, ["-c", str(path), "config"])
        assert result.exit_code == EXIT_CONFIG_INVALID

    def test_plugins(self, runner):
        """Test that listing plugins succeeds."""
        result = runner.invoke(cli, ["plugins"])
        assert result.exit_code == EXIT_OK


class TestCertifyCommand:
    """Test suite for the certify command."""

    def test_writes_certificate(self, runner, tmp_path):
        """Test that the canonical run writes its certificate and exits 1 on the Fourier gap."""
        result = runner.invoke(cli, ["certify", "-o", str(tmp_path)])
        assert result.exit_code == EXIT_CHECK_FAILED
        document = json.loads((tmp_path / "certificate.json").read_text())
        assert document["passed"] is False
        assert [name for name, ok in document["checks"].items() if not ok] == ["fourier_gap"]
        assert document["meta"]["config_hash"]
        assert (tmp_path / "sqsep-run.log").exists()

    def test_dimension_too_small(self, runner, tmp_path):
        """Test that a cube below the required dimension exits with code 2."""
        result = runner.invoke(cli, ["certify", "--d", "4", "-o", str(tmp_path)])
        assert result.exit_code == EXIT_CONFIG_INVALID
        assert not (tmp_path / "certificate.json").exists()

    def test_gamma_out_of_range(self, runner, tmp_path):
        """Test that gamma outside (0, 1) exits with code 2."""
        result = runner.invoke(cli, ["certify", "--gamma", "1.5", "-o", str(tmp_path)])
        assert result.exit_code == EXIT_CONFIG_INVALID


class TestSweepCommand:
    """Test suite for the sweep command."""

    def test_writes_grid(self, runner, tmp_path):
        """Test that every grid point gets a row."""
        result = runner.invoke(
            cli,
            ["sweep", "--gamma", "0.3", "--gamma", "0.35", "--r", "0.5", "-o", str(tmp_path)],
        )
        assert result.exit_code == EXIT_OK
        with open(tmp_path / "sweep.csv", encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
        assert [row["gamma"] for row in rows] == ["0.3", "0.35"]


@pytest.mark.integration
class TestExperimentCommands:
    """Test suite for the separation and audit-ldp commands."""

    def test_separation(self, runner, tmp_path, small_config_file):
        """Test that a small separation run writes its table and summary."""
        out = tmp_path / "out"
        result = runner.invoke(
            cli, ["-c", str(small_config_file), "separation", "-o", str(out)]
        )
        assert result.exit_code == EXIT_CHECK_FAILED
        assert (out / "separation.csv").exists()
        summary = json.loads((out / "separation-summary.json").read_text())
        assert summary["passed"] is False
        assert summary["checks"]["fourier_gap"] is False

    def test_separation_requires_certificate(self, runner, tmp_path):
        """Test that the canonical separation run stops before writing its table."""
        result = runner.invoke(cli, ["separation", "-o", str(tmp_path)])
        assert result.exit_code == EXIT_CHECK_FAILED
        assert not (tmp_path / "separation.csv").exists()

    def test_unknown_learner(self, runner, tmp_path, small_config_file):
        """Test that an unregistered learner fails the run."""
        result = runner.invoke(
            cli,
            ["-c", str(small_config_file), "separation", "-l", "nope", "-o", str(tmp_path)],
        )
        assert result.exit_code == 1
        assert not (tmp_path / "separation.csv").exists()

    def test_audit_ldp(self, runner, tmp_path, small_config_file):
        """Test that the privacy audit writes its report."""
        out = tmp_path / "out"
        result = runner.invoke(
            cli, ["-c", str(small_config_file), "audit-ldp", "-o", str(out)]
        )
        document = json.loads((out / "audit-ldp.json").read_text())
        assert result.exit_code == (0 if document["passed"] else 1)
        assert document["randomizers"]["randomized-response"]["status"] == "ok"
