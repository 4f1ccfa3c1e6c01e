"""Assembly of the lambda x lambda block operators of fractional SUSY QM.

Block operators act on lambda copies of the Fock space; tensor index
``(i - 1) * dim + n`` addresses |n> in block i. The supercharge and the
covariant derivative share one cyclic pattern:

    X = sum_{i<lambda} X_i e_{i+1,i} + X_lambda e_{1,lambda}
    X_i = c_i(N + i) a,   X_lambda = c_lambda(N) (a^dagger)^(lambda-1)

with c = f for Q and c = g for D.
"""
from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import replace

import numpy as np

from Fssqm.errors import (
    DimensionError,
    InvariantViolation,
    PhiPositivityError,
    StructureFunctionError,
    UnsupportedOrderError,
)
from Fssqm.models import ComponentFunction, FockRep, FssqmModel, root_of_unity
from Fssqm.utils.linalg import adjoint, identity, mat_power

log = logging.getLogger(__name__)

PHI_TOL = 1e-12
RADICAND_TOL = 1e-10
M_ORDERS = (2, 3, 4, 5)


# ---------------------------------------------------------------------------
# Scalar tables
# ---------------------------------------------------------------------------
def component_tables(f: Sequence[ComponentFunction], rep: FockRep) -> np.ndarray:
    """f_i(n) for i = 1..lambda (rows) and n = 0 .. dim + lambda - 1 (columns)."""
    if len(f) != rep.lam:
        raise DimensionError(f"expected {rep.lam} component functions, got {len(f)}")
    n = np.arange(rep.dim + rep.lam)
    return np.stack([fi.evaluate(n) for fi in f]).astype(complex)


def validate_phi(phi: np.ndarray, lam: int, upto: int) -> None:
    """phi(n) must be real and positive for lambda - 1 <= n <= upto."""
    for n in range(lam - 1, upto + 1):
        value = complex(phi[n])
        if abs(value.imag) > PHI_TOL * (1.0 + abs(value)) or value.real <= 0.0:
            raise PhiPositivityError(
                f"phi(n) = prod_i f_i(n) must be real positive for n >= {lam - 1}: "
                f"phi({n}) = {value:.6g}",
                n=n,
            )


def covariant_phases(lam: int) -> np.ndarray:
    """q^{-(lambda - 2i + 1)/2}, i = 1..lambda: g_i = q^{i-1} k f_i with k = q^{-(lambda-1)/2}."""
    return np.array([root_of_unity(lam, -(lam - 2 * i + 1) / 2) for i in range(1, lam + 1)])


def covariant_tables(f_tables: np.ndarray, lam: int, phases: np.ndarray | None = None) -> np.ndarray:
    phases = covariant_phases(lam) if phases is None else np.asarray(phases, dtype=complex)
    return phases[:, None] * f_tables


def h1_table(rep: FockRep, phi: np.ndarray) -> np.ndarray:
    """h_1(m) = phi(m) prod_{j=1}^{lambda-1} F(m + 1 - j) for m = 0 .. dim + lambda - 2."""
    lam = rep.lam
    m = np.arange(rep.dim + lam - 1)
    prod_F = np.prod([rep.F(m + 1 - j) for j in range(1, lam)], axis=0)
    h1 = (phi[: len(m)] * prod_F).real
    bad = np.flatnonzero(~np.isfinite(h1))
    if bad.size:
        raise StructureFunctionError(f"h_1(n) overflowed at n={int(bad[0])}", n=int(bad[0]))
    return h1


def alpha_tables(rep: FockRep, f_tables: np.ndarray) -> np.ndarray:
    """alpha_i(n) = |f_i(n)|^2 F(n+1-i) (i < lambda), alpha_lambda(n) = |f_lambda(n)|^2 prod_j F(n+1-j)."""
    lam = rep.lam
    n = np.arange(rep.dim + lam - 1)
    weights = np.abs(f_tables[:, : len(n)]) ** 2
    rows = [weights[i - 1] * rep.F(n + 1 - i) for i in range(1, lam)]
    rows.append(weights[lam - 1] * np.prod([rep.F(n + 1 - j) for j in range(1, lam)], axis=0))
    return np.stack(rows)


def m_tables(rep: FockRep, f_tables: np.ndarray) -> tuple[np.ndarray, np.ndarray | None]:
    """m_{i1}(n) for i = 1..l (rows), and the radicand delta(n)^2 when lambda is 4 or 5.

    lambda = 2 uses m_11 = alpha_1 + alpha_2, i.e. M_1 = Q_1^2 - H.
    """
    lam = rep.lam
    if lam not in M_ORDERS:
        raise UnsupportedOrderError(f"closed-form M_i are available for lambda in {M_ORDERS}, got {lam}")
    alpha = alpha_tables(rep, f_tables)
    total = alpha.sum(axis=0)
    if lam in (2, 3):
        return total[None, :], None

    a1, a2, a3, a4 = alpha[0], alpha[1], alpha[2], alpha[3]
    if lam == 4:
        cross = a1 * a3 + a2 * a4
    else:
        a5 = alpha[4]
        cross = a1 * a3 + a2 * a4 + a3 * a5 + a4 * a1 + a5 * a2
    radicand = total**2 - 4.0 * cross

    reached = rep.safe_dim + lam - 1
    floor = -RADICAND_TOL * (1.0 + total[:reached] ** 2)
    bad = np.flatnonzero(radicand[:reached] < floor)
    if bad.size:
        n = int(bad[0])
        raise InvariantViolation(f"negative radicand delta({n})^2 = {radicand[n]:.6g}")
    delta = np.sqrt(np.clip(radicand, 0.0, None))
    # (-1)^i: m_1 takes -delta, m_2 takes +delta
    return np.stack([0.5 * (total - delta), 0.5 * (total + delta)]), radicand


# ---------------------------------------------------------------------------
# Block operators
# ---------------------------------------------------------------------------
def build_block_operator(
    rep: FockRep, blocks: Mapping[tuple[int, int], np.ndarray], lam: int
) -> np.ndarray:
    """Place dim x dim ``blocks`` at 1-based (row, col) of a (lambda dim)^2 matrix."""
    dim = rep.dim
    out = np.zeros((lam * dim, lam * dim), dtype=complex)
    for (row, col), m in blocks.items():
        if not (1 <= row <= lam and 1 <= col <= lam):
            raise DimensionError(f"block index ({row}, {col}) outside 1..{lam}")
        m = np.asarray(m)
        if m.shape != (dim, dim):
            raise DimensionError(f"block ({row}, {col}) has shape {m.shape}, expected {(dim, dim)}")
        out[(row - 1) * dim:row * dim, (col - 1) * dim:col * dim] = m
    return out


def ladder_blocks(rep: FockRep, coeff_tables: np.ndarray) -> tuple[np.ndarray, ...]:
    """X_i = c_i(N+i) a for i < lambda and X_lambda = c_lambda(N) (a^dagger)^(lambda-1)."""
    lam, dim = rep.lam, rep.dim
    n = np.arange(dim)
    blocks = [np.diag(coeff_tables[i - 1][n + i]) @ rep.a_op for i in range(1, lam)]
    blocks.append(np.diag(coeff_tables[lam - 1][n]) @ mat_power(rep.adag_op, lam - 1))
    return tuple(blocks)


def cyclic_operator(rep: FockRep, blocks: Sequence[np.ndarray]) -> np.ndarray:
    lam = rep.lam
    placed = {(i + 1, i): blocks[i - 1] for i in range(1, lam)}
    placed[(1, lam)] = blocks[lam - 1]
    return build_block_operator(rep, placed, lam)


def cyclic_products(blocks: Sequence[np.ndarray]) -> list[np.ndarray]:
    """For each block i: X_{i-1} ... X_1 X_lambda ... X_i (the i-th diagonal block of X^lambda)."""
    lam = len(blocks)
    dim = blocks[0].shape[0]
    products = []
    for i in range(lam):
        prod = identity(dim)
        for step in range(lam):
            prod = blocks[(i + step) % lam] @ prod
        products.append(prod)
    return products


def diagonal_block_operator(rep: FockRep, tables: Sequence[np.ndarray]) -> np.ndarray:
    """sum_j diag(tables[j]) e_{j,j}."""
    return build_block_operator(
        rep, {(j + 1, j + 1): np.diag(tables[j]) for j in range(rep.lam)}, rep.lam
    )


def _h_tables(rep: FockRep, phi: np.ndarray) -> np.ndarray:
    h1 = h1_table(rep, phi)
    # h_i(n) = h_1(n + i - 1)
    return np.stack([h1[i:i + rep.dim] for i in range(rep.lam)])


def build_supercharge(rep: FockRep, f: Sequence[ComponentFunction]) -> np.ndarray:
    f_tables = component_tables(f, rep)
    validate_phi(f_tables.prod(axis=0), rep.lam, rep.dim)
    return cyclic_operator(rep, ladder_blocks(rep, f_tables))


def build_hamiltonian(rep: FockRep, f: Sequence[ComponentFunction]) -> tuple[np.ndarray, np.ndarray]:
    f_tables = component_tables(f, rep)
    phi = f_tables.prod(axis=0)
    validate_phi(phi, rep.lam, rep.dim)
    h = _h_tables(rep, phi)
    return diagonal_block_operator(rep, h).astype(complex), h


def build_covariant_derivative(
    rep: FockRep, f: Sequence[ComponentFunction], phases: np.ndarray | None = None
) -> np.ndarray:
    f_tables = component_tables(f, rep)
    validate_phi(f_tables.prod(axis=0), rep.lam, rep.dim)
    return cyclic_operator(rep, ladder_blocks(rep, covariant_tables(f_tables, rep.lam, phases)))


def build_grading_tau(lam: int, dim: int) -> np.ndarray:
    """tau = sum_i q^i e_{i,i}."""
    grades = np.array([root_of_unity(lam, i) for i in range(1, lam + 1)])
    return np.kron(np.diag(grades), identity(dim))


def build_reduction_unitary(rep: FockRep, lam: int) -> np.ndarray:
    """U = sum_{i,j} P_{i-j} e_{i,j}."""
    blocks = {(i, j): rep.projector(i - j) for i in range(1, lam + 1) for j in range(1, lam + 1)}
    return build_block_operator(rep, blocks, lam)


def _assemble_M(rep: FockRep, m1: np.ndarray) -> tuple[np.ndarray, ...]:
    """M_i = 1/2 sum_j diag(m_{i1}(n + j - 1)) e_{j,j}."""
    dim = rep.dim
    return tuple(
        0.5 * diagonal_block_operator(rep, [row[j:j + dim] for j in range(rep.lam)])
        for row in m1
    )


def build_M_operators(model: FssqmModel) -> tuple[np.ndarray, ...]:
    m1, _ = m_tables(model.rep, model.f_tables)
    return _assemble_M(model.rep, m1)


def hermitian_charges(Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Q_1 = (Q + Q^dag)/sqrt(2), Q_2 = (Q - Q^dag)/(i sqrt(2))."""
    Qd = adjoint(Q)
    return (Q + Qd) / np.sqrt(2.0), (Q - Qd) / (1j * np.sqrt(2.0))


# ---------------------------------------------------------------------------
# lambda = 2
# ---------------------------------------------------------------------------
def ssqm_limit_applies(model: FssqmModel) -> bool:
    if model.lam != 2:
        return False
    f1, f2 = model.f_tables[0], model.f_tables[1]
    scale = 1.0 + np.abs(f1).max()
    n = np.arange(1, model.dim + 1)
    return bool(
        np.abs(f1 - f2).max() <= PHI_TOL * scale
        and np.abs(f1.imag).max() <= PHI_TOL * scale
        and np.all(f1.real[n] > 0.0)
    )


def build_ssqm_limit(model: FssqmModel) -> tuple[np.ndarray, np.ndarray]:
    """The nilpotent pair (calQ, calQ^dag) with calQ = (Q + iD)/2 = f(N+1) a e_{2,1}.

    Scaled so {calQ, calQ^dag} = H; a (Q + iD)/sqrt(2) charge would give 2H.
    """
    if model.lam != 2:
        raise UnsupportedOrderError(f"the SSQM limit needs lambda = 2, got {model.lam}")
    if not ssqm_limit_applies(model):
        raise InvariantViolation("the SSQM limit needs f_1 = f_2 = f real with f(n) > 0 for n >= 1")
    # placed from A_1 directly so the structural zeros are exact
    calQ = build_block_operator(model.rep, {(2, 1): model.A[0]}, 2)
    return calQ, adjoint(calQ)


# ---------------------------------------------------------------------------
# Whole model
# ---------------------------------------------------------------------------
def build_model(
    rep: FockRep, f: Sequence[ComponentFunction], phases: np.ndarray | None = None
) -> FssqmModel:
    """Every operator of the realization; ``phases`` overrides the g_i / f_i ratios."""
    lam, dim = rep.lam, rep.dim
    f_tables = component_tables(f, rep)
    phi = f_tables.prod(axis=0)
    validate_phi(phi, lam, dim)
    g_tables = covariant_tables(f_tables, lam, phases)
    A = ladder_blocks(rep, f_tables)
    B = ladder_blocks(rep, g_tables)
    h = _h_tables(rep, phi)

    model = FssqmModel(
        lam=lam,
        rep=rep,
        f=tuple(f),
        f_tables=f_tables,
        g_tables=g_tables,
        phi_table=phi,
        h_tables=h,
        A=A,
        B=B,
        Q=cyclic_operator(rep, A),
        D=cyclic_operator(rep, B),
        H=diagonal_block_operator(rep, h).astype(complex),
        tau=build_grading_tau(lam, dim),
        U=build_reduction_unitary(rep, lam),
    )
    if lam in M_ORDERS:
        m1, radicands = m_tables(rep, f_tables)
        model = replace(model, M=_assemble_M(rep, m1), m_tables=m1, radicands=radicands)
    log.debug("built FSSQM model lambda=%d dim=%d (M_i: %d)", lam, dim, len(model.M))
    return model
