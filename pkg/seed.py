# seed.py (project root, next to app.py)
"""Write the reference model configurations to configs/*.json.

Safe to re-run: every file is regenerated from ``reference_configs()``.

    python seed.py [OUT_DIR]
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent
DEFAULT_DIM = 40

ONE = {"kind": "poly", "coeffs": [[1.0, 0.0]]}


def shifted(mu: int) -> dict:
    """f(n) = n - mu."""
    return {"kind": "poly", "coeffs": [[float(-mu), 0.0], [1.0, 0.0]]}


def oscillator(lam: int, dim: int = DEFAULT_DIM, f: list | None = None) -> dict:
    return {
        "lambda": lam,
        "fock_dimension": dim,
        "tolerance": 1e-9,
        "structure_function": {"kind": "oscillator"},
        "f": f or [dict(ONE) for _ in range(lam)],
    }


def c_lambda_extended(alpha: list[float], dim: int = DEFAULT_DIM, f: list | None = None) -> dict:
    lam = len(alpha)
    cfg = oscillator(lam, dim, f)
    cfg["structure_function"] = {"kind": "c_lambda_extended", "alpha": list(alpha)}
    return cfg


def reference_configs() -> dict[str, dict]:
    configs = {f"oscillator_lambda{lam}": oscillator(lam) for lam in range(2, 7)}
    configs.update({
        "clambda_lambda2": c_lambda_extended([0.5, -0.5]),
        "clambda_lambda3": c_lambda_extended([0.3, -0.2, -0.1]),
        "clambda_lambda4": c_lambda_extended([0.3, -0.1, -0.1, -0.1]),
        "engineered_lambda3": oscillator(3, f=[shifted(1), ONE, ONE]),
        "engineered_lambda4": c_lambda_extended(
            [0.3, -0.1, -0.1, -0.1], f=[shifted(1), ONE, ONE, ONE]
        ),
        "engineered_lambda5": oscillator(5, f=[shifted(1), shifted(2), ONE, ONE, ONE]),
    })
    return configs


def main(out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, cfg in reference_configs().items():
        path = out_dir / f"{name}.json"
        path.write_text(json.dumps(cfg, indent=2) + "\n", encoding="utf-8")
        written.append(path)
    return written


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "configs"
    for p in main(target):
        print("wrote", p)
