"""``spectrum``: closed-form and numeric spectra side by side."""
from __future__ import annotations

import click

from Fssqm.commands import EXIT_FAILED, EXIT_OK, config_option, emit, handle_errors, out_option
from Fssqm.utils import run_service
from Fssqm.utils import serializers as ser

CSV_HEADER = ["energy", "multiplicity", "numeric_energy", "numeric_multiplicity", "grades"]


def _grades(level, lam: int) -> str:
    return " ".join(ser.grade_label(m.grade, lam) for m in level.members)


def spectrum_rows(analytic, numeric, lam: int):
    rows = []
    for k, level in enumerate(analytic.levels):
        other = numeric.levels[k] if k < len(numeric.levels) else None
        rows.append([
            level.energy,
            level.multiplicity,
            other.energy if other else "",
            other.multiplicity if other else "",
            _grades(level, lam),
        ])
    return rows


@click.command("spectrum")
@config_option
@click.option("--levels", "n_levels", type=click.IntRange(min=1), default=6, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
@out_option
@handle_errors
def command(config_path, n_levels, fmt, out_path):
    """Energies, degeneracies and grades of the lowest levels."""
    cfg = run_service.load_config(config_path)
    tol = run_service.resolve_tolerance(cfg)
    model = run_service.build_from_config(cfg)
    analytic, numeric, mismatches = run_service.spectrum_levels(model, n_levels, tol)

    if fmt == "csv":
        emit(ser.to_csv(CSV_HEADER, spectrum_rows(analytic, numeric, model.lam)), out_path)
    else:
        emit(ser.dumps({
            "analytic": ser.serialize_spectrum(analytic),
            "numeric": ser.serialize_spectrum(numeric),
            "mismatches": mismatches,
        }), out_path)

    for problem in mismatches:
        click.echo(f"mismatch: {problem}", err=True)
    click.get_current_context().exit(EXIT_FAILED if mismatches else EXIT_OK)
