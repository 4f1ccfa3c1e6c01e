"""Dense complex matrix helpers used by every builder and check.

Thin wrappers over numpy/scipy that add the shape checks, tolerance
conventions and restriction helpers the rest of the package relies on.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import scipy.linalg

from Fssqm.errors import DimensionError, NonHermitianError

DEFAULT_TOL = 1e-9


def as_cmatrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def _require_square(*mats: np.ndarray) -> None:
    shape = mats[0].shape
    for m in mats:
        if m.shape[0] != m.shape[1] or m.shape != shape:
            raise DimensionError(
                f"expected square matrices of equal size, got {[x.shape for x in mats]}"
            )


def matmul(a, b) -> np.ndarray:
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_cmatrix(a).conj().T


def q_commutator(a, b, q: complex = 1.0) -> np.ndarray:
    """a b - q b a; q = 1 gives the commutator, q = -1 the anticommutator."""
    a, b = as_cmatrix(a), as_cmatrix(b)
    _require_square(a, b)
    return a @ b - q * (b @ a)


def anticommutator(a, b) -> np.ndarray:
    return q_commutator(a, b, -1.0)


def mat_power(a, k: int) -> np.ndarray:
    a = as_cmatrix(a)
    _require_square(a)
    if k < 0:
        raise DimensionError(f"negative matrix power {k}")
    return np.linalg.matrix_power(a, k)


def inf_norm(a) -> float:
    """Max absolute row sum; 0 for empty matrices."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.abs(a).sum(axis=1).max())


def nullspace_dim(a, tol: float = DEFAULT_TOL) -> int:
    """Number of zero directions, from the diagonal of a column-pivoted QR.

    A pivot with modulus below ``tol * (1 + inf_norm(a))`` counts as zero.
    """
    a = as_cmatrix(a)
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return cols
    r, _ = scipy.linalg.qr(a, mode="r", pivoting=True)
    pivots = np.abs(np.diag(r))
    threshold = tol * (1.0 + inf_norm(a))
    return int(cols - np.count_nonzero(pivots >= threshold))


def rank(a, tol: float = DEFAULT_TOL) -> int:
    return as_cmatrix(a).shape[1] - nullspace_dim(a, tol)


def hermiticity_residual(a) -> float:
    a = as_cmatrix(a)
    return inf_norm(a - adjoint(a)) / (1.0 + inf_norm(a))


def hermitian_eigenvalues(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    a = as_cmatrix(a)
    _require_square(a)
    if hermiticity_residual(a) > tol:
        raise NonHermitianError(
            f"matrix is not Hermitian (scaled residual {hermiticity_residual(a):.3e} > {tol:g})"
        )
    if a.shape[0] == 0:
        return np.zeros(0)
    return scipy.linalg.eigvalsh(0.5 * (a + adjoint(a)))


# ---------------------------------------------------------------------------
# Restriction and residuals
# ---------------------------------------------------------------------------
def restrict(a, idx: Sequence[int] | np.ndarray) -> np.ndarray:
    """Principal submatrix on the index set ``idx``."""
    idx = np.asarray(idx)
    return np.asarray(a)[np.ix_(idx, idx)]


def scaled_residual(lhs, rhs, cols: np.ndarray | None = None) -> float:
    """||lhs - rhs|| / (1 + max(||lhs||, ||rhs||)) over the selected columns.

    Restricting columns only (all rows kept) asserts the identity on every
    input vector of the selected subspace, wherever its image lands.
    """
    lhs = np.asarray(lhs)
    rhs = np.broadcast_to(np.asarray(rhs), lhs.shape)
    if cols is not None:
        lhs, rhs = lhs[:, cols], rhs[:, cols]
    scale = 1.0 + max(inf_norm(lhs), inf_norm(rhs))
    return inf_norm(lhs - rhs) / scale


def block(a, row: int, col: int, size: int) -> np.ndarray:
    """The (row, col) size x size block of a block matrix (0-based block indices)."""
    return np.asarray(a)[row * size:(row + 1) * size, col * size:(col + 1) * size]


def off_diagonal_block_norm(a, n_blocks: int, size: int, cols: np.ndarray | None = None) -> float:
    """Largest inf-norm among the off-diagonal blocks, restricted to ``cols`` within each block."""
    worst = 0.0
    for r in range(n_blocks):
        for c in range(n_blocks):
            if r == c:
                continue
            b = block(a, r, c, size)
            if cols is not None:
                b = b[:, cols]
            worst = max(worst, inf_norm(b))
    return worst
