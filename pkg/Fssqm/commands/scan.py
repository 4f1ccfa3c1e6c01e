"""``scan``: sweep one C_lambda-extended alpha, compensating on another index."""
from __future__ import annotations

import click

from Fssqm.commands import config_option, emit, handle_errors, out_option
from Fssqm.utils import run_service


@click.command("scan")
@config_option
@click.option("--index", "index", type=int, required=True, help="alpha index to sweep.")
@click.option("--from", "start", type=float, required=True)
@click.option("--to", "stop", type=float, required=True)
@click.option("--steps", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--compensate", type=int, default=None,
              help="alpha index absorbing the change (default: index + 1 mod lambda).")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@out_option
@handle_errors
def command(config_path, index, start, stop, steps, compensate, workers, out_path):
    """One CSV row per step: validity, ground degeneracies, classifications, audit flag."""
    cfg = run_service.load_config(config_path)
    tol = run_service.resolve_tolerance(cfg)
    rows = run_service.run_scan(cfg, index, start, stop, steps, tol,
                                compensate=compensate, workers=workers)
    emit(run_service.scan_csv(rows, cfg.lam, index), out_path)
