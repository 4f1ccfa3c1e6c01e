"""One module per CLI verb, each exposing ``command``; registered in app.py."""
from __future__ import annotations

import functools
import logging
from pathlib import Path

import click

from Fssqm.errors import BlockMismatchError, FssqmError, SpectrumMismatchError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILED = 2

config_option = click.option(
    "--config", "config_path", required=True, type=click.Path(dir_okay=False),
    help="JSON model configuration.",
)
out_option = click.option(
    "--out", "out_path", type=click.Path(dir_okay=False, writable=True), default=None,
    help="Write the report here instead of stdout.",
)


def emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8", newline="\n")
        log.info("wrote %s", out_path)
    else:
        click.echo(text, nl=False)


def handle_errors(fn):
    """Map library errors to exit codes: mismatches 2, everything else 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return fn(*args, **kwargs)
        except (BlockMismatchError, SpectrumMismatchError) as exc:
            click.echo(f"mismatch: {exc}", err=True)
            ctx.exit(EXIT_FAILED)
        except FssqmError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_INPUT)

    return wrapper
