import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from Fssqm.models import ComponentFunction, StructureFunctionSpec, StructureKind  # noqa: E402
from Fssqm.utils.fock_service import build_fock_rep  # noqa: E402
from Fssqm.utils.model_service import build_model  # noqa: E402


@pytest.fixture(scope="session")
def oscillator_model():
    """Cached f = 1 oscillator models keyed by (lambda, dim)."""
    cache = {}

    def _get(lam, dim):
        if (lam, dim) not in cache:
            rep = build_fock_rep(StructureFunctionSpec(StructureKind.OSCILLATOR), lam, dim)
            cache[lam, dim] = build_model(rep, [ComponentFunction.constant()] * lam)
        return cache[lam, dim]

    return _get
