"""sqsep Orchestrator: runs the certificate, separation, privacy and sweep experiments.

Each command builds what it needs from the resolved configuration, writes
its artifacts into the output directory and returns a CommandReport whose
checks the CLI turns into an exit code. Independent tasks (one per
translation vector a, or per grid point) run on worker threads through
asyncio.gather; results come back in task order and are written by the
calling coroutine only, so outputs do not depend on scheduling.
"""

from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar
from pathlib import Path
import asyncio
import logging
import math
import time

import numpy as np

from sqsep import __version__, utils
from sqsep.core.config import SqsepConfig
from sqsep.cube import HardFamily, build_family, certificate_block, fourier_gap, margin_of
from sqsep.cube.lift import chernoff_bound
from sqsep.errors import (
    CheckFailed,
    ConditioningMassLoss,
    MomentMatchFailure,
    NegativeWeight,
    NoProgress,
    OrthonormalityFailure,
    PrivacyViolation,
    SqsepError,
)
from sqsep.ldp import ComposedRandomizer, audit_epsilon, extreme_probes, run_noninteractive
from sqsep.ldp.plugin import get_randomizer_plugin, get_randomizer_plugins
from sqsep.learners.plugin import get_learner_plugin
from sqsep.moments import (
    ConstructionParams,
    MixtureP,
    audit_rescaled,
    coefficient_bound_violations,
    construct_q,
    gram_matrix,
    moments_p,
    ortho_basis,
    rescale_and_condition,
)
from sqsep.plugins import RANDOMIZERS_GROUP, LearnerPlugin
from sqsep.sq import (
    AdversarialPairing,
    HonestPolicy,
    InstanceEvaluator,
    SqOracleSession,
    constant,
    correlation,
)

from .reports import SEPARATION_COLUMNS, SWEEP_COLUMNS, CommandReport, SeparationTask


_logger = logging.getLogger("sqsep.console")

T = TypeVar("T")

ORTHONORMALITY_TOLERANCE = 1e-9
MOMENT_TOLERANCE = 1e-8
END_TO_END_STD_ERRORS = 3.0


def separation_checks(
    adaptive: Sequence[float],
    nonadaptive: Sequence[float],
    fractions: Sequence[float],
    ceilings: Dict[str, Any],
) -> Tuple[Dict[str, bool], Optional[float]]:
    """Acceptance checks of a separation run from per-learner mean accuracies.

    Args:
        adaptive: Mean accuracies of the adaptive learners
        nonadaptive: Mean accuracies of the non-adaptive learners
        fractions: Per non-adaptive learner, the share of translations whose
            answers did not depend on b
        ceilings: The ``ceilings`` configuration section

    Returns:
        Checks by name and the accuracy gap, None unless both kinds ran
    """
    checks: Dict[str, bool] = {}
    gap = None
    if nonadaptive:
        checks["nonadaptive_accuracy"] = max(nonadaptive) <= ceilings["lowdeg_max_accuracy"]
        checks["indistinguishable"] = (
            min(fractions) >= ceilings["indistinguishable_fraction"]
        )
    if adaptive:
        checks["adaptive_accuracy"] = min(adaptive) >= ceilings["perceptron_min_accuracy"]
    if adaptive and nonadaptive:
        gap = max(adaptive) - max(nonadaptive)
        checks["gap"] = gap >= ceilings["min_gap"]
    return checks, gap


class ExperimentOrchestrator:
    """Coordinates sqsep experiments for one resolved configuration."""

    def __init__(self, config: SqsepConfig, output_dir: Optional[str] = None):
        """Initialize orchestrator.

        Args:
            config: Resolved (merged and validated) configuration
            output_dir: Output directory, default ``output.directory``
        """
        self.config = config
        self.seed = int(config.get("experiment.seed", 0))
        self.output_dir = Path(output_dir or config.get("output.directory", "sqsep-out")).resolve()
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self._file_handler: Optional[logging.FileHandler] = None
        self._setup_file_logging()
        _logger.info("Output directory: %s", self.output_dir)

    def __enter__(self) -> "ExperimentOrchestrator":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _setup_file_logging(self) -> None:
        """Capture all sqsep logs in sqsep-run.log inside the output directory."""
        log_file = self.output_dir / "sqsep-run.log"
        file_handler = logging.FileHandler(log_file, mode="w", encoding="utf-8")
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
        file_handler.setFormatter(formatter)
        file_handler.setLevel(logging.DEBUG)

        root_logger = logging.getLogger("sqsep")
        root_logger.setLevel(logging.DEBUG)
        root_logger.addHandler(file_handler)
        self._file_handler = file_handler
        _logger.debug("Logging to file: %s", log_file)

    def close(self) -> None:
        """Detach and close the run log handler."""
        if self._file_handler is not None:
            logging.getLogger("sqsep").removeHandler(self._file_handler)
            self._file_handler.close()
            self._file_handler = None

    def meta(self) -> Dict[str, Any]:
        """Provenance block embedded in every output file."""
        return {
            "config": self.config.config,
            "config_hash": self.config.config_hash(),
            "version": __version__,
            "seed": self.seed,
        }

    def _stamp(self, row: Dict[str, Any]) -> Dict[str, Any]:
        return dict(row, config_hash=self.config.config_hash(), version=__version__)

    async def _gather(self, fn: Callable[..., T], items: Sequence[Any]) -> List[T]:
        """Run ``fn(item)`` for every item on worker threads, in item order."""
        semaphore = asyncio.Semaphore(int(self.config.get("experiment.workers", 4)))

        async def run_one(item) -> T:
            async with semaphore:
                return await asyncio.to_thread(fn, item)

        return await asyncio.gather(*(run_one(item) for item in items))

    def _family(self, params: ConstructionParams) -> HardFamily:
        return build_family(
            params,
            self.config.get("cube.d"),
            method=self.config.get("construction.method", "kernel"),
            threshold=self.config.get("cube.threshold"),
            check_dimension=self.config.get("cube.check_dimension", True),
        )

    # =========================================================================
    # CERTIFY
    # =========================================================================

    async def certify(self) -> CommandReport:
        """Build the family and write certificate.json.

        Raises:
            CheckFailed: If a construction stage fails outright
        """
        return await asyncio.to_thread(self._certify)

    def _certify(self) -> CommandReport:
        start = time.time()
        params = self.config.params()
        warnings = params.validate(self.config.get("construction.strict_regime", False))
        C = float(self.config.get("ceilings.C", 10))
        k = params.k

        try:
            basis = ortho_basis(params.eta, k)
            family = self._family(params)
        except OrthonormalityFailure as e:
            raise CheckFailed(f"orthonormality: {e}") from e
        except (MomentMatchFailure, NegativeWeight) as e:
            raise CheckFailed(f"moment_match: {e}") from e
        except ConditioningMassLoss as e:
            raise CheckFailed(f"conditioning: {e}") from e

        gram_error = float(np.max(np.abs(gram_matrix(basis) - np.eye(k + 1))))
        target = moments_p(params.eta, 2 * k)
        residuals = [
            float(abs(family.q.moment(j) - expected) / abs(expected))
            for j, expected in enumerate(target)
        ]
        audit = audit_rescaled(family.p_prime, family.q_prime, params, basis)
        rho_k = audit.rho_at_node
        theta = fourier_gap(family.p1, family.pm1)
        tau = self.config.tau()
        block = certificate_block(family)
        chernoff = chernoff_bound(family.d, params.gamma_tilde, family.threshold)
        margin_bound = params.gamma_tilde / (2 * math.sqrt(2))

        rng = utils.task_rng(self.seed, 0)
        inst = family.instance(family.random_a(rng), 0)
        cloud = inst.sample(rng, int(self.config.get("experiment.samples", 4000)))
        margin = margin_of(inst.weight_vector(), cloud.X, cloud.y)

        values = {
            "gram_max_error": gram_error,
            "moment_residuals": residuals,
            "rho_k": rho_k,
            "fourier_gap": theta,
            "tau": tau,
            "margin_sampled": margin,
            "margin_bound": margin_bound,
            "margin_threshold": family.threshold,
            "chernoff_bound": chernoff,
            "coefficient_bound_violations": len(coefficient_bound_violations(basis)),
            "measured_constants": audit.as_dict(),
            **block,
        }
        checks = {
            "orthonormality": gram_error <= ORTHONORMALITY_TOLERANCE,
            "moment_match": max(residuals) <= MOMENT_TOLERANCE,
            "rho_lower_bound": rho_k >= 1 - C * params.eta,
            "tv_lift": block["tv_p1_neg_pm1"] <= C * params.eta,
            "tv_instances_chain": block["tv_instances"]
            <= 2 * block["tv_p1_neg_pm1"] + 1e-12,
            "fourier_gap": theta <= tau,
            "margin_bound": margin >= margin_bound - 1e-12,
            "conditioning_mass": family.threshold < params.gamma_tilde
            and block["p1_conditioned_mass"] <= chernoff,
            "high_degree": bool(audit.high_degree_ok),
        }

        path = self.output_dir / "certificate.json"
        utils.write_json(
            path,
            {
                "meta": self.meta(),
                "params": params.as_dict(),
                "dimension": {
                    "d": family.d,
                    "min_dimension": params.min_dimension,
                    "conditioning_dimension": (
                        params.conditioning_dimension(tau) if 0 < tau < 4 else None
                    ),
                },
                "warnings": warnings,
                "values": values,
                "checks": checks,
                "passed": all(checks.values()),
            },
        )
        _logger.debug("Certificate built in %s", utils.format_duration(time.time() - start))
        return CommandReport(
            "certify",
            path,
            checks,
            {"rho_k": rho_k, "fourier_gap": theta, "tv_p1_neg_pm1": block["tv_p1_neg_pm1"]},
        )

    # =========================================================================
    # SEPARATION
    # =========================================================================

    def _learners(self) -> List[LearnerPlugin]:
        return [
            get_learner_plugin(name, self.config.get(f"learners.{name}"))
            for name in self.config.get("experiment.learners", ["perceptron", "lowdeg"])
        ]

    def _separation_task(
        self,
        family: HardFamily,
        learners: List[LearnerPlugin],
        tau: float,
        budget: int,
        index: int,
    ) -> SeparationTask:
        """Run every learner against D_{a,0} and D_{a,1} for the index-th a."""
        samples = int(self.config.get("experiment.samples", 4000))
        gamma = self.config.get("construction.gamma")
        dimension = 2 * family.d
        pair = family.pair(family.random_a(utils.task_rng(self.seed, index)))
        holdout = pair.sample_clouds(utils.task_rng(self.seed, index, 0), samples)
        task = SeparationTask(index)

        for li, plugin in enumerate(learners, start=1):
            answers = []
            for b in (0, 1):
                if plugin.adaptive:
                    evaluator = InstanceEvaluator(
                        pair.instance(b),
                        "mc",
                        samples,
                        rng=utils.task_rng(self.seed, index, li, b + 1),
                    )
                    session = SqOracleSession(
                        tau,
                        HonestPolicy(evaluator),
                        budget=self.config.get("experiment.perceptron_budget"),
                    )
                    oracle = "honest"
                else:
                    # both b share the coupled clouds, so paired answers coincide
                    policy = AdversarialPairing.for_pair(
                        pair, b, "mc", samples, rng=utils.task_rng(self.seed, index, li, 0)
                    )
                    session = SqOracleSession(tau, policy, budget=budget, adaptive=False)
                    oracle = "pairing"

                status = "ok"
                try:
                    result = plugin.learn(
                        session, dimension, gamma, utils.task_rng(self.seed, index, li)
                    )
                except NoProgress as e:
                    result = e.result
                    status = "no_progress"
                answers.append(session.answer_vector())
                task.rows.append(
                    {
                        "learner": plugin.name,
                        "a_index": index,
                        "b": b,
                        "adaptive": plugin.adaptive,
                        "oracle": oracle,
                        "accuracy": 1.0 - result.hypothesis.error(holdout[b]),
                        "queries": result.queries_used,
                        "rounds": result.rounds,
                        "status": status,
                        "separated_answers": session.branches().count("separated"),
                    }
                )

            same = None
            if not plugin.adaptive:
                same = answers[0].shape == answers[1].shape and bool(
                    np.array_equal(answers[0], answers[1])
                )
            task.indistinguishable[plugin.name] = same
            for row in task.rows[-2:]:
                row["indistinguishable"] = same
        return task

    async def separation(self) -> CommandReport:
        """Run the separation experiment and write separation.csv."""
        start = time.time()
        params = self.config.params()
        family = await asyncio.to_thread(self._family, params)
        tau, budget = self.config.tau(), self.config.query_budget()
        theta = fourier_gap(family.p1, family.pm1)
        if theta > tau and self.config.get("experiment.require_certificate", True):
            needed = params.conditioning_dimension(tau) if tau > 0 else None
            raise CheckFailed(
                f"fourier_gap: lifted coefficients differ by {theta:.4g} > tau={tau:.4g}"
                f" after conditioning removed {family.p1.conditioned_mass:.4g} of P_1;"
                f" the pairing oracle cannot hide b at d={family.d} (needs d >= {needed})"
            )
        learners = self._learners()
        n_a = int(self.config.get("experiment.n_a", 200))
        _logger.info(
            "Separation over %d translations: tau=%.4g, budget=%d, learners=%s",
            n_a,
            tau,
            budget,
            ", ".join(plugin.name for plugin in learners),
        )

        tasks = await self._gather(
            lambda index: self._separation_task(family, learners, tau, budget, index),
            range(n_a),
        )

        rows = [row for task in tasks for row in task.rows]
        means: Dict[str, float] = {}
        summary_rows = []
        for plugin in learners:
            mine = [row for row in rows if row["learner"] == plugin.name]
            means[plugin.name] = float(np.mean([row["accuracy"] for row in mine]))
            flags = [task.indistinguishable[plugin.name] for task in tasks]
            fraction = None if plugin.adaptive else float(np.mean(flags))
            summary_rows.append(
                {
                    "learner": plugin.name,
                    "a_index": "mean",
                    "adaptive": plugin.adaptive,
                    "accuracy": means[plugin.name],
                    "queries": float(np.mean([row["queries"] for row in mine])),
                    "rounds": float(np.mean([row["rounds"] for row in mine])),
                    "indistinguishable": fraction,
                }
            )

        adaptive = [means[p.name] for p in learners if p.adaptive]
        nonadaptive = [means[p.name] for p in learners if not p.adaptive]
        fractions = [row["indistinguishable"] for row in summary_rows if not row["adaptive"]]
        checks, gap = separation_checks(
            adaptive, nonadaptive, fractions, self.config.get("ceilings")
        )
        checks["fourier_gap"] = theta <= tau
        if gap is not None:
            summary_rows.append({"learner": "gap", "a_index": "mean", "accuracy": gap})

        path = self.output_dir / "separation.csv"
        utils.write_csv(
            path, SEPARATION_COLUMNS, [self._stamp(row) for row in rows + summary_rows]
        )
        utils.write_json(
            self.output_dir / "separation-summary.json",
            {
                "meta": self.meta(),
                "tau": tau,
                "query_budget": budget,
                "fourier_gap": theta,
                "mean_accuracy": means,
                "indistinguishable_fraction": {
                    row["learner"]: row["indistinguishable"]
                    for row in summary_rows
                    if row.get("adaptive") is False
                },
                "gap": gap,
                "checks": checks,
                "passed": all(checks.values()),
            },
        )
        _logger.debug("Separation finished in %s", utils.format_duration(time.time() - start))
        return CommandReport("separation", path, checks, dict(means, gap=gap, fourier_gap=theta))

    # =========================================================================
    # AUDIT-LDP
    # =========================================================================

    async def audit_ldp(self) -> CommandReport:
        """Audit every registered randomizer and run one end-to-end estimate."""
        return await asyncio.to_thread(self._audit_ldp)

    def _audit_ldp(self) -> CommandReport:
        epsilon = float(self.config.get("ldp.epsilon", 1.0))
        n_users = int(self.config.get("ldp.n_users", 10000))
        params = self.config.params()
        family = self._family(params)
        rng = utils.task_rng(self.seed, 0)
        inst = family.instance(family.random_a(rng), 0)
        X, y = extreme_probes(inst.dimension, utils.task_rng(self.seed, 1))

        checks: Dict[str, bool] = {}
        randomizers: Dict[str, Dict[str, Any]] = {}
        plugins = get_randomizer_plugins().get_plugins_by_group(RANDOMIZERS_GROUP)
        for name in sorted(plugins):
            schema = plugins[name].config_schema.get("properties", {})
            options = {"epsilon": epsilon} if "epsilon" in schema else None
            plugin = get_randomizer_plugin(name, options)
            if math.isinf(plugin.epsilon):
                _logger.info("Randomizer '%s' has no privacy guarantee, audit skipped", name)
                randomizers[name] = {"epsilon": "inf", "status": "skipped"}
                continue
            entry: Dict[str, Any] = {"epsilon": plugin.epsilon}
            try:
                single = plugin.create(correlation(0), plugin.epsilon)
                entry["max_log_ratio"] = audit_epsilon(single, X, y)
                composed = ComposedRandomizer(
                    [plugin.create(correlation(i), plugin.epsilon / 2) for i in (0, 1)]
                )
                entry["composed_log_ratio"] = audit_epsilon(composed, X, y)
                entry["status"] = "ok"
            except PrivacyViolation as e:
                _logger.error("Privacy audit failed: %s", e)
                entry["status"] = "violation"
                entry["error"] = str(e)
            checks[f"audit:{name}"] = entry["status"] == "ok"
            randomizers[name] = entry

        run = run_noninteractive(
            [constant()], epsilon, n_users, inst, utils.task_rng(self.seed, 2)
        )
        estimate = run.estimates[0]
        deviation = abs(estimate.estimate - 1.0) / estimate.std_error
        checks["end_to_end"] = deviation <= END_TO_END_STD_ERRORS

        path = self.output_dir / "audit-ldp.json"
        utils.write_json(
            path,
            {
                "meta": self.meta(),
                "randomizers": randomizers,
                "end_to_end": {
                    "query": estimate.descriptor,
                    "estimate": estimate.estimate,
                    "std_error": estimate.std_error,
                    "users": estimate.users,
                    "deviation": deviation,
                },
                "checks": checks,
                "passed": all(checks.values()),
            },
        )
        return CommandReport(
            "audit-ldp",
            path,
            checks,
            {"estimate": estimate.estimate, "std_error": estimate.std_error},
        )

    # =========================================================================
    # SWEEP
    # =========================================================================

    def _sweep_point(self, point) -> Dict[str, Any]:
        gamma, r = point
        row: Dict[str, Any] = {"gamma": gamma, "r": r, "valid": False}
        try:
            params = ConstructionParams(gamma, r)
            row.update(params.as_dict())
            row["min_dimension"] = params.min_dimension
            row["tau"] = params.tau(self.config.get("oracle.c2", 4.0))
            row["query_budget"] = params.query_budget(self.config.get("oracle.c1", 5.0))
            row["warnings"] = "; ".join(params.validate())
            basis = ortho_basis(params.eta, params.k)
            q = construct_q(params, basis, self.config.get("construction.method", "kernel"))
            p_prime, q_prime = rescale_and_condition(MixtureP(params.eta), q, params)
            audit = audit_rescaled(p_prime, q_prime, params, basis)
            row.update(
                {
                    key: getattr(audit, key)
                    for key in (
                        "rho_at_node",
                        "measured_c_rho",
                        "measured_c_decay",
                        "low_degree_gap",
                        "base_tv",
                    )
                }
            )
            row["valid"] = True
        except (SqsepError, ArithmeticError) as e:
            _logger.debug("Sweep point gamma=%g r=%g rejected: %s", gamma, r, e)
            row["error"] = str(e)
        return row

    async def sweep(
        self, gammas: Optional[Sequence[float]] = None, rs: Optional[Sequence[float]] = None
    ) -> CommandReport:
        """Derive parameters and moment certificates over a (gamma, r) grid."""
        gammas = list(gammas or self.config.get("sweep.gammas"))
        rs = list(rs or self.config.get("sweep.rs"))
        points = [(float(g), float(r)) for g in gammas for r in rs]
        rows = await self._gather(self._sweep_point, points)

        path = self.output_dir / "sweep.csv"
        utils.write_csv(path, SWEEP_COLUMNS, [self._stamp(row) for row in rows])
        valid = sum(row["valid"] for row in rows)
        return CommandReport("sweep", path, {}, {"points": len(rows), "valid": valid})
