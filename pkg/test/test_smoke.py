"""Smoke tests over the shipped reference configurations.

1. Every file in configs/ is exactly what seed.py would write.
2. Every reference model passes the full audit, its closed-form and numeric
   spectra agree, and both invariant matrices take their predicted values.
"""

import json
from pathlib import Path

import numpy as np
import pytest

import seed
from Fssqm.audit import audit
from Fssqm.utils import analysis_service as analysis
from Fssqm.utils import run_service

CONFIGS_DIR = Path(__file__).resolve().parents[1] / "configs"
REFERENCE = seed.reference_configs()


def test_configs_dir_matches_seed():
    on_disk = {p.stem: json.loads(p.read_text()) for p in CONFIGS_DIR.glob("*.json")}
    assert on_disk == REFERENCE


@pytest.fixture(scope="module", params=sorted(REFERENCE))
def reference_model(request):
    cfg = run_service.config_from_dict(REFERENCE[request.param])
    return request.param, run_service.build_from_config(cfg)


def test_audit_passes(reference_model):
    name, model = reference_model
    failed = [r.name for r in audit(model) if not r.passed]
    assert failed == [], name


def test_spectra_agree(reference_model):
    _, model = reference_model
    n_levels = min(6, model.safe_dim // model.lam)
    analytic, _, mismatches = run_service.spectrum_levels(model, n_levels, 1e-9)
    assert mismatches == []
    assert analytic.levels[0].multiplicity == model.lam * (model.lam - 1) // 2


def test_invariants(reference_model):
    _, model = reference_model
    lam = model.lam
    topo = analysis.topological_invariants(model)
    assert np.array_equal(topo.delta, analysis.expected_delta(lam))
    for mu in range(lam):
        sector = analysis.sector_invariants(model, mu)
        assert np.array_equal(sector.delta, analysis.expected_sector_delta(lam, mu))


def test_tmp_seed_roundtrip(tmp_path):
    written = seed.main(tmp_path)
    assert sorted(p.stem for p in written) == sorted(REFERENCE)
