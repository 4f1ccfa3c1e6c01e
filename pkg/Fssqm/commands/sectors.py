"""``sectors``: per-mu classification, ground data, lowest levels and Delta^(mu)."""
from __future__ import annotations

import json

import click

from Fssqm.commands import EXIT_FAILED, EXIT_OK, config_option, emit, handle_errors, out_option
from Fssqm.utils import analysis_service as analysis
from Fssqm.utils import run_service
from Fssqm.utils import serializers as ser

CSV_HEADER = ["mu", "classification", "ground_energy", "ground_degeneracy",
              "level_1", "level_2", "level_3", "delta"]


def sector_rows(summaries):
    rows = []
    for s in summaries:
        levels = (s["levels"] + ["", "", ""])[:3]
        rows.append([s["mu"], s["classification"], s["ground_energy"], s["ground_degeneracy"],
                     *levels, json.dumps(s["topology"]["delta"])])
    return rows


@click.command("sectors")
@config_option
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
@out_option
@handle_errors
def command(config_path, fmt, out_path):
    """Reduce the model to its lambda sectors and classify each one."""
    cfg = run_service.load_config(config_path)
    tol = run_service.resolve_tolerance(cfg)
    model = run_service.build_from_config(cfg)
    summaries = [run_service.sector_summary(model, mu, tol) for mu in range(model.lam)]

    if fmt == "csv":
        emit(ser.to_csv(CSV_HEADER, sector_rows(summaries)), out_path)
    else:
        emit(ser.dumps({"lambda": model.lam, "sectors": summaries}), out_path)

    bad = [
        s["mu"] for s in summaries
        if s["topology"]["delta"] != analysis.expected_sector_delta(model.lam, s["mu"]).tolist()
    ]
    for mu in bad:
        click.echo(f"mismatch: Delta^({mu}) differs from the two-case formula", err=True)
    click.get_current_context().exit(EXIT_FAILED if bad else EXIT_OK)
