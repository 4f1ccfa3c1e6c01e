"""Command-line entry point: settings, logging and command registration.
Command logic lives in Fssqm/commands/*.

    python app.py verify --config configs/oscillator_lambda3.json
"""
from __future__ import annotations

import logging
import os
import sys

import click

# ---------------------------------------------------------------------------
# Settings
# ---------------------------------------------------------------------------
LOG_LEVEL_ENV = "FSSQM_LOG_LEVEL"
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def load_settings(env=None) -> dict:
    """Process-level settings, read from the environment at invocation time."""
    env = os.environ if env is None else env
    # FSSQM_TOL is resolved per config in Fssqm.utils.run_service
    return {"LOG_LEVEL": env.get(LOG_LEVEL_ENV, "WARNING").upper()}


def configure_logging(level_name: str, verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.getLevelName(level_name)
    if not isinstance(level, int):
        raise click.BadParameter(f"unknown log level {level_name!r}", param_hint=LOG_LEVEL_ENV)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


# ---------------------------------------------------------------------------
# CLI group
# ---------------------------------------------------------------------------
class FssqmGroup(click.Group):
    """Usage errors exit with 1 like any other input error; 2 means a failed relation."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as exc:
            exc.exit_code = 1
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = 1
            raise


@click.group(cls=FssqmGroup)
@click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level.")
@click.pass_context
def cli(ctx, verbose):
    """Fractional supersymmetric quantum mechanics on truncated GDOA Fock spaces."""
    settings = load_settings()
    configure_logging(settings["LOG_LEVEL"], verbose)
    ctx.obj = settings


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------
from Fssqm.commands import scan, sectors, spectrum, verify  # noqa: E402

cli.add_command(verify.command)
cli.add_command(spectrum.command)
cli.add_command(sectors.command)
cli.add_command(scan.command)


if __name__ == "__main__":
    cli()
