"""Truncated Fock-space representations of generalized deformed oscillator algebras.

A GDOA is fixed by its structure function F(N) (a^dagger a = F(N),
[a, a^dagger] = G(N) = F(N+1) - F(N)). The Z_lambda grading comes from
T = exp(2 pi i N / lambda) and its spectral projectors P_mu.
"""
from __future__ import annotations

import logging
from dataclasses import replace

import numpy as np

from Fssqm.errors import (
    AlphaSumError,
    DimensionError,
    InvariantViolation,
    StructureFunctionError,
    UnsupportedOrderError,
)
from Fssqm.models import FockRep, StructureFunctionSpec, StructureKind, root_of_unity
from Fssqm.utils.linalg import adjoint, identity, mat_power, q_commutator, scaled_residual

log = logging.getLogger(__name__)

ALPHA_SUM_TOL = 1e-12


# ---------------------------------------------------------------------------
# Structure function
# ---------------------------------------------------------------------------
def _validate_F(F: np.ndarray) -> None:
    bad = np.flatnonzero(~np.isfinite(F))
    if bad.size:
        n = int(bad[0])
        raise StructureFunctionError(f"F(n) overflowed at n={n}", n=n)
    if F[0] != 0.0:
        raise StructureFunctionError(f"F(0) must be 0, got {F[0]:g}", n=0)
    bad = np.flatnonzero(F[1:] <= 0.0)
    if bad.size:
        n = int(bad[0]) + 1
        raise StructureFunctionError(
            f"F(n) must be positive for n >= 1: F({n}) = {F[n]:g} <= 0", n=n
        )


def eval_structure_function(spec: StructureFunctionSpec, n_max: int) -> np.ndarray:
    """F(0..n_max) for ``spec``; raises on F(0) != 0 or F(n) <= 0 for 1 <= n <= n_max."""
    if spec.kind == StructureKind.OSCILLATOR:
        F = np.arange(n_max + 1, dtype=float)

    elif spec.kind == StructureKind.C_LAMBDA_EXTENDED:
        alpha = np.asarray(spec.alpha, dtype=float)
        lam = spec.lam if spec.lam is not None else len(alpha)
        if lam < 2 or len(alpha) != lam:
            raise StructureFunctionError(
                f"c_lambda_extended needs lambda >= 2 and exactly lambda alphas "
                f"(lambda={lam}, got {len(alpha)})"
            )
        total = float(alpha.sum())
        if abs(total) > ALPHA_SUM_TOL:
            raise AlphaSumError(
                f"C_lambda-extended parameters must satisfy sum_mu alpha_mu = 0 "
                f"(got sum {total:.6g})"
            )
        # G(n) = 1 + alpha_{n mod lambda};  F(n+1) = F(n) + G(n)
        G = 1.0 + alpha[np.arange(n_max) % lam]
        with np.errstate(over="ignore", invalid="ignore"):
            F = np.concatenate([[0.0], np.cumsum(G)])

    elif spec.kind == StructureKind.TABLE:
        values = np.asarray(spec.values, dtype=float)
        if len(values) < n_max + 1:
            raise StructureFunctionError(
                f"table structure function must supply F(0..{n_max}), got {len(values)} values"
            )
        F = values[: n_max + 1].copy()

    else:  # pragma: no cover - enum is closed
        raise StructureFunctionError(f"unknown structure function kind {spec.kind!r}")

    _validate_F(F)
    return F


# ---------------------------------------------------------------------------
# Representation
# ---------------------------------------------------------------------------
def build_fock_rep(spec: StructureFunctionSpec, lam: int, dim: int) -> FockRep:
    """Matrices of N, a, a^dagger, T and P_mu on |0>..|dim-1>.

    The structure function is tabulated up to n = dim + lam - 1 because the
    block operators evaluate F at shifted arguments; tables shorter than that
    (table kind, which only has to cover 0..dim) hold their last value.
    """
    if lam < 2:
        raise UnsupportedOrderError(f"lambda must be an integer >= 2, got {lam}")
    if dim < 4 * lam:
        raise DimensionError(
            f"fock dimension must be at least 4*lambda = {4 * lam}, got {dim}",
            required=4 * lam,
        )
    if spec.kind == StructureKind.C_LAMBDA_EXTENDED and spec.lam not in (None, lam):
        raise StructureFunctionError(
            f"c_lambda_extended structure function declared for lambda={spec.lam}, "
            f"model has lambda={lam}"
        )
    if spec.kind == StructureKind.C_LAMBDA_EXTENDED and spec.lam is None:
        spec = replace(spec, lam=lam)

    n_ext = dim + lam - 1
    if spec.kind == StructureKind.TABLE:
        F = np.pad(eval_structure_function(spec, dim), (0, n_ext - dim), mode="edge")
    else:
        F = eval_structure_function(spec, n_ext)

    n = np.arange(dim)
    a_op = np.diag(np.sqrt(F[1:dim]), k=1).astype(complex)
    T_op = np.diag(np.exp(2j * np.pi * (n % lam) / lam))

    rep = FockRep(
        spec=spec,
        lam=lam,
        dim=dim,
        F_table=F,
        N_op=np.diag(n).astype(complex),
        a_op=a_op,
        adag_op=adjoint(a_op),
        T_op=T_op,
        projectors=(),
        safe_dim=dim - 2 * lam,
    )
    rep = replace(rep, projectors=build_projectors(rep))
    log.debug("built Fock rep kind=%s lambda=%d dim=%d safe_dim=%d",
              spec.kind.value, lam, dim, rep.safe_dim)
    return rep


def build_projectors(rep: FockRep) -> tuple[np.ndarray, ...]:
    """P_mu = (1/lambda) sum_nu q^{-mu nu} T^nu, snapped to their exact 0/1 diagonal."""
    lam = rep.lam
    powers = [mat_power(rep.T_op, nu) for nu in range(lam)]
    projectors = []
    for mu in range(lam):
        P = sum(root_of_unity(lam, -mu * nu) * powers[nu] for nu in range(lam)) / lam
        exact = np.round(P.real)
        drift = float(np.abs(P - exact).max())
        if drift > 1e-9:
            raise InvariantViolation(f"P_{mu} is not a 0/1 projector (drift {drift:.2e})")
        projectors.append(exact.astype(complex))
    return tuple(projectors)


# ---------------------------------------------------------------------------
# Relation checks (residual reports, never raise)
# ---------------------------------------------------------------------------
def _safe_cols(rep: FockRep) -> np.ndarray:
    return np.arange(rep.safe_dim)


def check_gdoa_relations(rep: FockRep) -> dict[str, float]:
    cols = _safe_cols(rep)
    N, a, adag = rep.N_op, rep.a_op, rep.adag_op
    n = np.arange(rep.dim)
    return {
        "[N, a^dag] = a^dag": scaled_residual(q_commutator(N, adag), adag, cols),
        "[N, a] = -a": scaled_residual(q_commutator(N, a), -a, cols),
        "[a, a^dag] = G(N)": scaled_residual(q_commutator(a, adag), np.diag(rep.G(n)), cols),
        "a^dag a = F(N)": scaled_residual(adag @ a, np.diag(rep.F(n)), cols),
        "a a^dag = F(N+1)": scaled_residual(a @ adag, np.diag(rep.F(n + 1)), cols),
    }


def check_grading_relations(rep: FockRep, tol: float | None = None) -> dict[str, float]:
    """Residuals of the T and P_mu intertwining relations on the safe block.

    Relations above ``tol`` (when given) are logged at WARNING.
    """
    cols = _safe_cols(rep)
    N, a, adag, T = rep.N_op, rep.a_op, rep.adag_op, rep.T_op
    q = rep.q
    lam = rep.lam
    report = {
        "[N, T] = 0": scaled_residual(q_commutator(N, T), 0.0, cols),
        "a^dag T = q^-1 T a^dag": scaled_residual(q_commutator(adag, T, 1 / q), 0.0, cols),
        "a T = q T a": scaled_residual(q_commutator(a, T, q), 0.0, cols),
        "[N, P_mu] = 0": 0.0,
        "a^dag P_mu = P_mu+1 a^dag": 0.0,
        "a P_mu = P_mu-1 a": 0.0,
    }
    for mu in range(lam):
        P = rep.projector(mu)
        report["[N, P_mu] = 0"] = max(
            report["[N, P_mu] = 0"], scaled_residual(q_commutator(N, P), 0.0, cols)
        )
        report["a^dag P_mu = P_mu+1 a^dag"] = max(
            report["a^dag P_mu = P_mu+1 a^dag"],
            scaled_residual(adag @ P, rep.projector(mu + 1) @ adag, cols),
        )
        report["a P_mu = P_mu-1 a"] = max(
            report["a P_mu = P_mu-1 a"],
            scaled_residual(a @ P, rep.projector(mu - 1) @ a, cols),
        )
    if tol is not None:
        for name, residual in report.items():
            if residual > tol:
                log.warning("grading relation %s off by %.3e", name, residual)
    return report


def check_projector_identities(rep: FockRep) -> dict[str, float]:
    lam, dim = rep.lam, rep.dim
    I = identity(dim)
    T = rep.T_op
    worst_herm = 0.0
    worst_orth = 0.0
    for mu in range(lam):
        P = rep.projector(mu)
        worst_herm = max(worst_herm, scaled_residual(adjoint(P), P))
        for nu in range(lam):
            expected = P if mu == nu else np.zeros_like(P)
            worst_orth = max(worst_orth, scaled_residual(P @ rep.projector(nu), expected))
    return {
        "T^lambda = I": scaled_residual(mat_power(T, lam), I),
        "T^dag T = I": scaled_residual(adjoint(T) @ T, I),
        "P_mu^dag = P_mu": worst_herm,
        "P_mu P_nu = delta_mu,nu P_mu": worst_orth,
        "sum_mu P_mu = I": scaled_residual(sum(rep.projectors), I),
    }


def residue_counts(rep: FockRep, size: int | None = None) -> list[int]:
    """Number of basis states |n>, n < size, in each residue class mod lambda."""
    size = rep.dim if size is None else size
    return [int(np.count_nonzero(np.arange(size) % rep.lam == mu)) for mu in range(rep.lam)]
