"""Command-line entry point: kansa solve | experiment | kernel-check | schema"""
import functools
import json
import logging
import sys
from typing import Callable, Optional

import click

from kansa_collocation import __version__
from kansa_collocation.config import Configuration, RunConfig
from kansa_collocation.exceptions import KansaError
from kansa_collocation.runner import EXIT_CONFIG_ERROR, ExperimentRunner, RunOutcome

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str) -> None:
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def run_options(command: Callable) -> Callable:
    """Options shared by every computing subcommand"""

    @click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                  help="Run configuration JSON (default: $KANSA_CONFIG_PATH or config/run_config.json)")
    @click.option("--seed", type=int, default=None, help="Override the configured seed")
    @click.option("--output", "output_dir", type=click.Path(file_okay=False), default=None,
                  help="Output directory")
    @click.option("--threads", type=int, default=None,
                  help="Worker threads for the harness (default: machine parallelism)")
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        return command(*args, **kwargs)

    return wrapper


def _execute(
    action: Callable[[ExperimentRunner], RunOutcome],
    config_path: Optional[str],
    seed: Optional[int],
    output_dir: Optional[str],
    threads: Optional[int],
) -> None:
    ctx = click.get_current_context()
    try:
        config = Configuration(config_path, seed=seed, output_dir=output_dir, threads=threads)
        configure_logging(config.log_level)
        outcome = action(ExperimentRunner(config))
    except KansaError as e:
        click.echo(f"error: {e}", err=True)
        ctx.exit(EXIT_CONFIG_ERROR)
    click.echo(outcome.summary)
    ctx.exit(outcome.exit_code)


@click.group()
@click.version_option(__version__, prog_name="kansa")
def main():
    """Unsymmetric Kansa RBF collocation for the Poisson equation."""


@main.command()
@run_options
@click.option("--dump-matrix", is_flag=True, help="Also write the Kansa matrix as CSV")
def solve(config_path, seed, output_dir, threads, dump_matrix):
    """Assemble and solve the configured Poisson problem."""
    _execute(lambda runner: runner.solve(dump_matrix=dump_matrix), config_path, seed, output_dir, threads)


@main.command()
@run_options
def experiment(config_path, seed, output_dir, threads):
    """Run the experiment named in the configuration."""
    _execute(lambda runner: runner.experiment(), config_path, seed, output_dir, threads)


@main.command("kernel-check")
@run_options
def kernel_check(config_path, seed, output_dir, threads):
    """Check the configured kernel's admissibility conditions."""
    _execute(lambda runner: runner.kernel_check(), config_path, seed, output_dir, threads)


@main.command()
def schema():
    """Print the JSON schema of run configurations."""
    click.echo(json.dumps(RunConfig.model_json_schema(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
