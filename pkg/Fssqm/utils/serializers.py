"""JSON and CSV serialization helpers for the CLI reports.

Complex numbers are written as [re, im] pairs everywhere. CSV output uses
',' separators, '.' decimals, a header row and LF line endings.
"""
from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Sequence

import numpy as np

from Fssqm.models import (
    Level,
    MemberState,
    OrbitStep,
    RelationResult,
    SectorReport,
    SectorState,
    SpectrumReport,
    TopologyReport,
)


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    # avoid "-0.0" in output
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def grade_label(z: complex, lam: int) -> str:
    """'q^k' for the root of unity ``z``."""
    k = int(round(np.angle(z) * lam / (2 * np.pi))) % lam
    return f"q^{k if k else lam}"


def serialize_relation(r: RelationResult):
    return {
        "name": r.name,
        "formula": r.formula,
        "residual": r.residual,
        "tolerance": r.tolerance,
        "passed": r.passed,
    }


def serialize_member(m: MemberState | SectorState):
    if isinstance(m, SectorState):
        return {"k": m.k, "i": m.i, "fock": m.fock, "energy": m.energy, "grade": complex_pair(m.grade)}
    return {"block": m.block, "fock": m.fock, "grade": complex_pair(m.grade)}


def serialize_level(level: Level):
    return {
        "energy": level.energy,
        "multiplicity": level.multiplicity,
        "members": [serialize_member(m) for m in level.members],
    }


def serialize_spectrum(report: SpectrumReport):
    return {
        "zero_tol": report.zero_tol,
        "levels": [serialize_level(lvl) for lvl in report.levels],
    }


def serialize_orbit(orbit: Iterable[OrbitStep]):
    return [
        {
            "source": serialize_member(step.source),
            "target": None if step.target is None else serialize_member(step.target),
            "amplitude": complex_pair(step.amplitude),
        }
        for step in orbit
    ]


def serialize_topology(report: TopologyReport):
    out = {
        "grades": [complex_pair(c) for c in report.grades],
        "multiplicities": list(report.multiplicities),
        "zero_mode_counts": list(report.zero_mode_counts),
        "delta": np.asarray(report.delta, dtype=int).tolist(),
    }
    if report.residues:
        out["residues"] = list(report.residues)
    return out


def serialize_sector(report: SectorReport, levels: Sequence[float], topology: TopologyReport,
                     orbit: Iterable[OrbitStep] = ()):
    return {
        "mu": report.mu,
        "classification": report.classification.value,
        "ground_energy": report.ground_energy,
        "ground_degeneracy": report.ground_degeneracy,
        "charge_annihilates_ground": report.charge_annihilates_ground,
        "levels": [float(e) for e in levels],
        "topology": serialize_topology(topology),
        "charge_action": serialize_orbit(orbit),
    }


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------
def dumps(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value + 0.0)
    return value
