"""Config loading, model construction and report assembly shared by the CLI verbs."""
from __future__ import annotations

import json
import logging
import os
import time
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from Fssqm.audit import all_passed, audit
from Fssqm.errors import ConfigError, FssqmError
from Fssqm.models import FssqmModel, StructureFunctionSpec, StructureKind
from Fssqm.schemas import ModelConfig
from Fssqm.utils import analysis_service as analysis
from Fssqm.utils import serializers as ser
from Fssqm.utils.fock_service import build_fock_rep
from Fssqm.utils.linalg import DEFAULT_TOL
from Fssqm.utils.model_service import build_model

log = logging.getLogger(__name__)

TOL_ENV = "FSSQM_TOL"
SECTOR_LEVELS = 3


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------
def _validation_message(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        where = ".".join(str(p) for p in err["loc"]) or "config"
        parts.append(f"{where}: {err['msg']}")
    return "; ".join(parts)


def config_from_dict(data: Mapping) -> ModelConfig:
    try:
        return ModelConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid config: {_validation_message(exc)}") from exc


def load_config(path: str | Path) -> ModelConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config_from_dict(data)


def resolve_tolerance(cfg: ModelConfig, env: Mapping[str, str] | None = None) -> float:
    """FSSQM_TOL beats the config's ``tolerance``, which beats the default."""
    env = os.environ if env is None else env
    raw = env.get(TOL_ENV)
    if raw:
        try:
            tol = float(raw)
        except ValueError as exc:
            raise ConfigError(f"{TOL_ENV} must be a positive number, got {raw!r}") from exc
        if not tol > 0:
            raise ConfigError(f"{TOL_ENV} must be a positive number, got {raw!r}")
        return tol
    return cfg.tolerance if cfg.tolerance is not None else DEFAULT_TOL


def build_from_config(cfg: ModelConfig, spec: StructureFunctionSpec | None = None) -> FssqmModel:
    rep = build_fock_rep(spec or cfg.to_spec(), cfg.lam, cfg.fock_dimension)
    return build_model(rep, cfg.components())


def config_echo(cfg: ModelConfig):
    return cfg.model_dump(mode="json", by_alias=True)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------
def spectrum_levels(model: FssqmModel, n_levels: int, tol: float):
    """Closed-form and numeric spectra plus their disagreements."""
    analytic = analysis.analytic_spectrum(model, n_levels)
    numeric = analysis.numeric_spectrum(model, n_levels)
    return analytic, numeric, analysis.spectrum_mismatches(analytic, numeric, tol)


def sector_summary(model: FssqmModel, mu: int, tol: float):
    report = analysis.reduce_sector(model, mu, tol)
    levels = [energy for energy, _ in analysis.sector_levels(model, mu)[:SECTOR_LEVELS]]
    topology = analysis.sector_invariants(model, mu, tol, report=report)
    orbit = analysis.sector_orbit(model, mu, report)
    return ser.serialize_sector(report, levels, topology, orbit)


def run_report(cfg: ModelConfig, model: FssqmModel, tol: float, timings: bool = False):
    """Everything ``verify --format json`` prints. Timings only when asked for."""
    clock: dict[str, float] = {}

    def timed(name, fn, *args):
        start = time.perf_counter()
        out = fn(*args)
        clock[name] = time.perf_counter() - start
        return out

    results = timed("audit", audit, model, tol)
    n_levels = min(6, model.safe_dim // model.lam)
    analytic, numeric, mismatches = timed("spectrum", spectrum_levels, model, n_levels, tol)
    topology = timed("topology", analysis.topological_invariants, model, tol)
    sectors = timed("sectors", lambda: [sector_summary(model, mu, tol) for mu in range(model.lam)])

    report = {
        "config": config_echo(cfg),
        "tolerance": tol,
        "passed": all_passed(results) and not mismatches,
        "audit": [ser.serialize_relation(r) for r in results],
        "spectrum": {
            "analytic": ser.serialize_spectrum(analytic),
            "numeric": ser.serialize_spectrum(numeric),
            "mismatches": mismatches,
        },
        "topology": ser.serialize_topology(topology),
        "sectors": sectors,
    }
    if timings:
        report["timings"] = {k: round(v, 6) for k, v in clock.items()}
    return report


# ---------------------------------------------------------------------------
# Scan over one C_lambda-extended parameter
# ---------------------------------------------------------------------------
def scan_base_alpha(cfg: ModelConfig) -> list[float]:
    sf = cfg.structure_function
    if sf.kind == StructureKind.C_LAMBDA_EXTENDED:
        return list(sf.alpha)
    if sf.kind == StructureKind.OSCILLATOR:
        # the oscillator is the C_lambda-extended family at alpha = 0
        return [0.0] * cfg.lam
    raise ConfigError("scan needs an oscillator or c_lambda_extended structure function")


def scan_values(start: float, stop: float, steps: int) -> list[float]:
    if steps < 1:
        raise ConfigError(f"steps must be >= 1, got {steps}")
    if start == stop:
        return [float(start)]
    return [float(v) for v in np.linspace(start, stop, steps)]


def compensated_alpha(base: list[float], index: int, value: float, compensate: int) -> tuple[float, ...]:
    alpha = list(base)
    alpha[index] = value
    alpha[compensate] = 0.0
    alpha[compensate] = -sum(alpha)
    return tuple(alpha)


def scan_row(cfg: ModelConfig, step: int, alpha: tuple[float, ...], index: int, tol: float) -> dict:
    row = {"step": step, "alpha": alpha[index], "valid": False, "audit_pass": False,
           "sectors": [], "error": ""}
    spec = StructureFunctionSpec(StructureKind.C_LAMBDA_EXTENDED, lam=cfg.lam, alpha=alpha)
    try:
        model = build_from_config(cfg, spec)
        results = audit(model, tol)
        sectors = [analysis.reduce_sector(model, mu, tol) for mu in range(cfg.lam)]
    except FssqmError as exc:
        log.info("scan step %d (alpha_%d=%g) invalid: %s", step, index, alpha[index], exc)
        row["error"] = str(exc)
        return row
    row.update(
        valid=True,
        audit_pass=all_passed(results),
        sectors=[(s.ground_degeneracy, s.classification.value) for s in sectors],
    )
    return row


def run_scan(cfg: ModelConfig, index: int, start: float, stop: float, steps: int,
             tol: float, compensate: int | None = None, workers: int = 1) -> list[dict]:
    """One row per step, in step order regardless of ``workers``."""
    lam = cfg.lam
    if not 0 <= index < lam:
        raise ConfigError(f"alpha index must be in 0..{lam - 1}, got {index}")
    compensate = (index + 1) % lam if compensate is None else compensate
    if not 0 <= compensate < lam or compensate == index:
        raise ConfigError(f"compensating index must differ from {index} and lie in 0..{lam - 1}")
    base = scan_base_alpha(cfg)
    jobs = [
        (cfg, step, compensated_alpha(base, index, value, compensate), index, tol)
        for step, value in enumerate(scan_values(start, stop, steps))
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: scan_row(*job), jobs))
    return [scan_row(*job) for job in jobs]


def scan_csv(rows: list[dict], lam: int, index: int) -> str:
    header = ["step", f"alpha_{index}", "valid", "audit_pass"]
    for mu in range(lam):
        header += [f"ground_degeneracy_{mu}", f"classification_{mu}"]
    header.append("error")
    body = []
    for row in rows:
        cells = [row["step"], row["alpha"], row["valid"], row["audit_pass"]]
        sectors = row["sectors"] or [("", "invalid")] * lam
        for degeneracy, label in sectors:
            cells += [degeneracy, label]
        cells.append(row["error"])
        body.append(cells)
    return ser.to_csv(header, body)
