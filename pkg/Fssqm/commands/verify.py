"""``verify``: run the relation audit on one configuration."""
from __future__ import annotations

import click

from Fssqm.audit import all_passed, audit
from Fssqm.commands import EXIT_FAILED, EXIT_OK, config_option, emit, handle_errors, out_option
from Fssqm.utils import run_service
from Fssqm.utils import serializers as ser


def render_table(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'relation':<{width}}  {'residual':>10}  {'tolerance':>9}  status  formula"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{r.name:<{width}}  {r.residual:>10.3e}  {r.tolerance:>9.1e}  {status:<6}  {r.formula}"
        )
    failed = sum(1 for r in results if not r.passed)
    lines.append(f"{len(results)} relations, {failed} failed")
    return "\n".join(lines) + "\n"


@click.command("verify")
@config_option
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table",
              show_default=True)
@click.option("--timings", is_flag=True, help="Add wall-clock timings to the JSON report.")
@out_option
@handle_errors
def command(config_path, fmt, timings, out_path):
    """Check every operator identity of the model."""
    cfg = run_service.load_config(config_path)
    tol = run_service.resolve_tolerance(cfg)
    model = run_service.build_from_config(cfg)

    if fmt == "json":
        report = run_service.run_report(cfg, model, tol, timings=timings)
        emit(ser.dumps(report), out_path)
        passed = report["passed"]
    else:
        results = audit(model, tol)
        emit(render_table(results), out_path)
        passed = all_passed(results)

    click.get_current_context().exit(EXIT_OK if passed else EXIT_FAILED)
