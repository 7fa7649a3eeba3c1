"""Tests for the experiment orchestrator."""

import csv
import dataclasses
import json
import logging

import pytest

from sqsep.core.config import SqsepConfig
from sqsep.core.orchestrator import ExperimentOrchestrator, separation_checks
from sqsep.errors import CheckFailed
from sqsep.moments import audit_rescaled
from sqsep.plugins import reset_plugin_registry


SMALL = {
    "experiment.n_a": 2,
    "experiment.samples": 200,
    "experiment.workers": 2,
    "learners.perceptron.max_rounds": 3,
    "ldp.n_users": 2000,
}


@pytest.fixture(autouse=True)
def fresh_registry():
    reset_plugin_registry()
    yield
    reset_plugin_registry()


@pytest.fixture
def small_config():
    return SqsepConfig().merged(SMALL)


def read_rows(path):
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


class TestRunLog:
    """Test suite for the per-run log file."""

    def test_log_file_attached_and_released(self, tmp_path, small_config):
        """Test that sqsep-run.log is written and its handler removed on close."""
        root = logging.getLogger("sqsep")
        before = len(root.handlers)
        with ExperimentOrchestrator(small_config, str(tmp_path)) as orchestrator:
            assert len(root.handlers) == before + 1
            logging.getLogger("sqsep.console").info("hello from the run")
            assert orchestrator.output_dir == tmp_path.resolve()
        assert len(root.handlers) == before
        assert "hello from the run" in (tmp_path / "sqsep-run.log").read_text()

    def test_meta_block(self, tmp_path, small_config):
        """Test that the provenance block carries config, hash, version and seed."""
        with ExperimentOrchestrator(small_config, str(tmp_path)) as orchestrator:
            meta = orchestrator.meta()
        assert meta["config_hash"] == small_config.config_hash()
        assert meta["config"] == small_config.config
        assert meta["seed"] == 0
        assert meta["version"]


class TestCertify:
    """Test suite for the certificate command."""

    async def test_canonical_certificate(self, tmp_path, small_config):
        """Test that gamma=0.35, r=0.5, d=12 fails only the Fourier gap check."""
        with ExperimentOrchestrator(small_config, str(tmp_path)) as orchestrator:
            report = await orchestrator.certify()
        assert report.failed == ["fourier_gap"]
        document = json.loads(report.path.read_text())
        assert document["passed"] is False
        assert document["meta"]["config_hash"] == small_config.config_hash()
        assert document["params"]["k"] == 1
        values = document["values"]
        assert values["fourier_gap"] > values["tau"]
        assert values["margin_sampled"] >= values["margin_bound"] > 0
        assert values["p1_conditioned_mass"] <= values["chernoff_bound"]
        assert document["dimension"]["conditioning_dimension"] > 80_000
        assert max(values["moment_residuals"]) <= 1e-8
        assert values["tv_instances"] <= 2 * values["tv_p1_neg_pm1"] + 1e-12
        assert any("eta" in warning for warning in document["warnings"])

    async def test_explicit_tolerance_covers_gap(self, tmp_path, small_config):
        """Test that the Fourier gap check passes once tau exceeds the measured gap."""
        config = small_config.merged({"oracle.tau": 0.5})
        with ExperimentOrchestrator(config, str(tmp_path)) as orchestrator:
            report = await orchestrator.certify()
        assert report.passed, report.failed

    async def test_unconditioned_margin(self, tmp_path, small_config):
        """Test that conditioning at 0 admits zero-margin points."""
        config = small_config.merged({"cube.threshold": 0.0})
        with ExperimentOrchestrator(config, str(tmp_path)) as orchestrator:
            report = await orchestrator.certify()
        assert report.checks["margin_bound"] is False
        assert report.checks["conditioning_mass"] is True

    async def test_threshold_above_gamma_tilde(self, tmp_path, small_config):
        """Test that a threshold above gamma~ loses the conditioning mass bound."""
        config = small_config.merged({"cube.threshold": 0.05})
        with ExperimentOrchestrator(config, str(tmp_path)) as orchestrator:
            report = await orchestrator.certify()
        assert report.checks["conditioning_mass"] is False
        document = json.loads(report.path.read_text())
        assert document["values"]["chernoff_bound"] == 1.0

    async def test_high_degree_failure(self, tmp_path, small_config, monkeypatch):
        """Test that a failed high-degree coefficient audit fails the certificate."""

        def failing_audit(*args, **kwargs):
            return dataclasses.replace(audit_rescaled(*args, **kwargs), high_degree_ok=False)

        monkeypatch.setattr(
            "sqsep.core.orchestrator.orchestrator.audit_rescaled", failing_audit
        )
        with ExperimentOrchestrator(small_config, str(tmp_path)) as orchestrator:
            report = await orchestrator.certify()
        assert report.checks["high_degree"] is False
        assert not report.passed

    async def test_byte_identical(self, tmp_path, small_config):
        """Test that the same configuration and seed reproduce the certificate exactly."""
        paths = []
        for name in ("first", "second"):
            with ExperimentOrchestrator(small_config, str(tmp_path / name)) as orchestrator:
                paths.append((await orchestrator.certify()).path)
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestSeparationChecks:
    """Test suite for separation_checks."""

    CEILINGS = SqsepConfig.get_default_config()["ceilings"]

    def test_separated_run_passes(self):
        """Test a run that meets every acceptance criterion."""
        checks, gap = separation_checks([0.95], [0.5], [0.97], self.CEILINGS)
        assert checks == {
            "nonadaptive_accuracy": True,
            "indistinguishable": True,
            "adaptive_accuracy": True,
            "gap": True,
        }
        assert gap == pytest.approx(0.45)

    def test_accurate_nonadaptive_learner_fails(self):
        """Test that a non-adaptive learner above its ceiling fails the run."""
        checks, gap = separation_checks([0.9948], [0.9948], [0.0], self.CEILINGS)
        assert checks["nonadaptive_accuracy"] is False
        assert checks["indistinguishable"] is False
        assert checks["gap"] is False
        assert checks["adaptive_accuracy"] is True
        assert gap == pytest.approx(0.0)

    def test_single_kind(self):
        """Test that the gap needs both kinds of learner."""
        checks, gap = separation_checks([], [0.5], [1.0], self.CEILINGS)
        assert set(checks) == {"nonadaptive_accuracy", "indistinguishable"}
        assert gap is None


@pytest.mark.integration
class TestSeparation:
    """Test suite for the separation command."""

    @pytest.fixture
    def unchecked_config(self, small_config):
        return small_config.merged({"experiment.require_certificate": False})

    async def test_canonical_rejected(self, tmp_path, small_config):
        """Test that the run stops when the Fourier gap exceeds tau."""
        with ExperimentOrchestrator(small_config, str(tmp_path)) as orchestrator:
            with pytest.raises(CheckFailed, match="fourier_gap"):
                await orchestrator.separation()
        assert not (tmp_path / "separation.csv").exists()

    async def test_rows_and_summary(self, tmp_path, unchecked_config):
        """Test one row per (learner, a, b) plus mean and gap rows."""
        with ExperimentOrchestrator(unchecked_config, str(tmp_path)) as orchestrator:
            report = await orchestrator.separation()
        rows = read_rows(report.path)
        per_task = [row for row in rows if row["a_index"] != "mean"]
        assert len(per_task) == 2 * 2 * 2
        assert {row["oracle"] for row in per_task if row["learner"] == "lowdeg"} == {"pairing"}
        assert {row["oracle"] for row in per_task if row["learner"] == "perceptron"} == {"honest"}
        assert [row["learner"] for row in rows if row["a_index"] == "mean"] == [
            "perceptron",
            "lowdeg",
            "gap",
        ]
        assert {row["config_hash"] for row in rows} == {unchecked_config.config_hash()}
        assert set(report.checks) == {
            "nonadaptive_accuracy",
            "indistinguishable",
            "adaptive_accuracy",
            "gap",
            "fourier_gap",
        }
        assert report.checks["fourier_gap"] is False
        assert not report.passed
        summary = json.loads((tmp_path / "separation-summary.json").read_text())
        assert summary["passed"] is False
        assert summary["fourier_gap"] > summary["tau"]
        assert summary["query_budget"] == 477
        assert summary["gap"] == pytest.approx(
            summary["mean_accuracy"]["perceptron"] - summary["mean_accuracy"]["lowdeg"]
        )

    async def test_deterministic(self, tmp_path, unchecked_config):
        """Test that repeated runs write identical tables regardless of scheduling."""
        contents = []
        for name in ("first", "second"):
            with ExperimentOrchestrator(unchecked_config, str(tmp_path / name)) as orchestrator:
                contents.append((await orchestrator.separation()).path.read_bytes())
        assert contents[0] == contents[1]

    async def test_nonadaptive_only(self, tmp_path, unchecked_config):
        """Test that a run without adaptive learners has no gap check."""
        config = unchecked_config.merged({"experiment.learners": ["lowdeg"]})
        with ExperimentOrchestrator(config, str(tmp_path)) as orchestrator:
            report = await orchestrator.separation()
        assert "gap" not in report.checks
        assert report.summary["gap"] is None


class TestAuditLdp:
    """Test suite for the privacy audit command."""

    async def test_audit_report(self, tmp_path, small_config):
        """Test that randomized response passes and passthrough is skipped."""
        with ExperimentOrchestrator(small_config, str(tmp_path)) as orchestrator:
            report = await orchestrator.audit_ldp()
        document = json.loads(report.path.read_text())
        assert report.checks["audit:randomized-response"]
        entry = document["randomizers"]["randomized-response"]
        assert entry["max_log_ratio"] == pytest.approx(1.0, abs=1e-9)
        assert entry["composed_log_ratio"] <= 1.0 + 1e-9
        assert document["randomizers"]["passthrough"]["status"] == "skipped"
        assert document["end_to_end"]["users"] == 2000
        assert "end_to_end" in report.checks


class TestSweep:
    """Test suite for the parameter sweep."""

    async def test_grid_rows(self, tmp_path, small_config):
        """Test one row per grid point, with invalid points kept and explained."""
        with ExperimentOrchestrator(small_config, str(tmp_path)) as orchestrator:
            report = await orchestrator.sweep([0.3, 0.9], [0.5])
        rows = read_rows(report.path)
        assert [(float(row["gamma"]), float(row["r"])) for row in rows] == [(0.3, 0.5), (0.9, 0.5)]
        assert rows[0]["valid"] == "True"
        assert rows[1]["valid"] == "False"
        assert rows[1]["error"]
        assert report.summary == {"points": 2, "valid": 1}
