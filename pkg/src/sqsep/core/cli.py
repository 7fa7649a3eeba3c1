"""
sqsep CLI: Command-line interface for the separation experiments
"""

from typing import Any, Callable, Coroutine, Dict
import sys
import logging
import json
import asyncio
import click

from sqsep import __version__
from sqsep.core import SqsepConfig, conf, ExperimentOrchestrator
from sqsep.core.orchestrator import CommandReport
from sqsep.errors import CheckFailed, ConfigurationError
from sqsep.learners.plugin import get_learner_plugins
from sqsep.ldp.plugin import get_randomizer_plugins


EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_INVALID = 2


def setup_logging(verbose: bool = False):
    """Set up logging configuration."""
    level = logging.DEBUG if verbose else logging.INFO

    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[logging.StreamHandler(sys.stdout)],
    )

    logger = logging.getLogger("sqsep.console")
    logger.setLevel(level)


@click.group()
@click.version_option(version=__version__, prog_name="sqsep")
@click.option("-v", "--verbose", is_flag=True, help="Enable verbose logging")
@click.option(
    "-c",
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Configuration file (default: sqsep.json or sqsep.config.json)",
)
@click.pass_context
def cli(ctx, verbose, config_path):
    """sqsep CLI."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    setup_logging(verbose)
    try:
        ctx.obj["config"] = SqsepConfig(config_path=config_path) if config_path else conf
    except ConfigurationError as e:
        logging.getLogger("sqsep.console").error("Invalid configuration: %s", e)
        ctx.exit(EXIT_CONFIG_INVALID)


def construction_options(fn):
    """Flags overriding the construction and output keys shared by every command."""
    options = [
        click.option("--gamma", type=float, default=None, help="Margin gamma"),
        click.option("--r", "r", type=float, default=None, help="Exponent r"),
        click.option("--d", "d", type=int, default=None, help="Half dimension of the cube"),
        click.option("--seed", type=int, default=None, help="Root seed"),
        click.option("-o", "--output", default=None, help="Output directory"),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _overrides(gamma, r, d, seed, output, **extra) -> Dict[str, Any]:
    return {
        "construction.gamma": gamma,
        "construction.r": r,
        "cube.d": d,
        "experiment.seed": seed,
        "output.directory": output,
        **extra,
    }


async def _execute(
    config: SqsepConfig,
    command: Callable[[ExperimentOrchestrator], Coroutine[Any, Any, CommandReport]],
    verbose: bool,
) -> int:
    logger = logging.getLogger("sqsep.console")
    try:
        for warning in config.validate():
            logger.debug("Continuing despite regime warning: %s", warning)
    except ConfigurationError as e:
        logger.error("Invalid configuration: %s", e)
        return EXIT_CONFIG_INVALID

    try:
        with ExperimentOrchestrator(config) as orchestrator:
            report = await command(orchestrator)

    except CheckFailed as e:
        logger.error("Check failed: %s", e)
        return EXIT_CHECK_FAILED

    except KeyboardInterrupt:
        logger.info("Run interrupted by user.")
        return -1

    # pylint: disable=broad-except
    except Exception as e:
        logger.error("Unexpected error: %s", e)
        if verbose:
            # pylint: disable=import-outside-toplevel
            import traceback

            traceback.print_exc()
        return EXIT_CHECK_FAILED

    logger.info("\n%s written to %s", report.command, report.path)
    for key, value in report.summary.items():
        logger.info("\t%s: %s", key, value)
    if report.passed:
        return EXIT_OK
    logger.error("\nFailed checks: %s", ", ".join(report.failed))
    return EXIT_CHECK_FAILED


@cli.command()
@construction_options
@click.pass_context
def certify(ctx, gamma, r, d, seed, output):
    """Construct the hard family and write its certificate."""
    config = ctx.obj["config"].merged(_overrides(gamma, r, d, seed, output))
    exit_code = asyncio.run(_execute(config, lambda o: o.certify(), ctx.obj["verbose"]))
    ctx.exit(exit_code)


@cli.command()
@construction_options
@click.option("--n-a", "n_a", type=int, default=None, help="Number of translation vectors")
@click.option(
    "-l",
    "--learner",
    "learners",
    multiple=True,
    help="Learner plugin to run (repeatable)",
)
@click.option("--workers", type=int, default=None, help="Worker threads")
@click.pass_context
def separation(ctx, gamma, r, d, seed, output, n_a, learners, workers):
    """Run adaptive and non-adaptive learners on the hard family."""
    config = ctx.obj["config"].merged(
        _overrides(
            gamma,
            r,
            d,
            seed,
            output,
            **{
                "experiment.n_a": n_a,
                "experiment.learners": list(learners) or None,
                "experiment.workers": workers,
            },
        )
    )
    exit_code = asyncio.run(_execute(config, lambda o: o.separation(), ctx.obj["verbose"]))
    ctx.exit(exit_code)


@cli.command(name="audit-ldp")
@construction_options
@click.option("--epsilon", type=float, default=None, help="Per-user privacy budget")
@click.option("--n-users", "n_users", type=int, default=None, help="Users in the end-to-end run")
@click.pass_context
def audit_ldp(ctx, gamma, r, d, seed, output, epsilon, n_users):
    """Audit every registered local randomizer."""
    config = ctx.obj["config"].merged(
        _overrides(gamma, r, d, seed, output, **{"ldp.epsilon": epsilon, "ldp.n_users": n_users})
    )
    exit_code = asyncio.run(_execute(config, lambda o: o.audit_ldp(), ctx.obj["verbose"]))
    ctx.exit(exit_code)


@cli.command()
@click.option("--gamma", "gammas", type=float, multiple=True, help="Grid value of gamma")
@click.option("--r", "rs", type=float, multiple=True, help="Grid value of r")
@click.option("-o", "--output", default=None, help="Output directory")
@click.pass_context
def sweep(ctx, gammas, rs, output):
    """Tabulate derived parameters and moment certificates over a (gamma, r) grid."""
    config = ctx.obj["config"].merged({"output.directory": output})
    exit_code = asyncio.run(
        _execute(config, lambda o: o.sweep(gammas or None, rs or None), ctx.obj["verbose"])
    )
    ctx.exit(exit_code)


@cli.command()
@click.option(
    "--key",
    default=None,
    help="Key to show from the configuration (dot notation)",
)
@click.pass_context
def config(ctx, key):
    """Show the identified sqsep configuration."""
    logger = logging.getLogger("sqsep.console")
    current = ctx.obj["config"]
    logger.info("sqsep configuration:\n")
    logger.info("> Path: %s", current.path)
    logger.info("> Hash: %s", current.config_hash())
    if key:
        logger.info("> Key: Value")
        value = json.dumps(current.get(key, "undefined"), indent=2)
        logger.info("%s: %s", key, value)
    else:
        logger.info("> Configuration Dictionary:")
        logger.info(json.dumps(current.config, indent=2))


@cli.command()
@click.pass_context
def plugins(ctx):
    """List the registered learner and randomizer plugins."""
    logger = logging.getLogger("sqsep.console")
    get_learner_plugins()
    registry = get_randomizer_plugins()
    for info in registry.list_plugins():
        logger.info(
            "%s  %s %s: %s",
            info["group"],
            info["name"],
            info["version"],
            info["description"],
        )


def main() -> None:
    """Entry point for CLI."""

    # pylint: disable=no-value-for-parameter
    cli()


if __name__ == "__main__":
    main()
