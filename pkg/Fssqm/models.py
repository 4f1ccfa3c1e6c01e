# Fssqm/models.py
"""Domain types shared by the builders, the analysis layer and the CLI.

Matrices are plain ``numpy`` arrays (complex128). Every container here is
frozen after construction; builders return new instances instead of mutating.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


# -------------------------------------------------------------------
# ENUMS
# -------------------------------------------------------------------
class StructureKind(str, Enum):
    OSCILLATOR = "oscillator"
    C_LAMBDA_EXTENDED = "c_lambda_extended"
    TABLE = "table"


class ComponentKind(str, Enum):
    POLY = "poly"
    TABLE = "table"


class SectorClass(str, Enum):
    UNBROKEN_NONDEGENERATE = "unbroken-nondegenerate"
    UNBROKEN_DEGENERATE = "unbroken-degenerate"
    BROKEN_ZERO_ENERGY = "broken-zero-energy"
    BROKEN_POSITIVE_ENERGY = "broken-positive-energy"


def root_of_unity(lam: int, power: float = 1.0) -> complex:
    """q**power with q = exp(2 pi i / lam); fractional powers use the principal branch.

    Integer multiples of lam give exactly 1.
    """
    if power % lam == 0:
        return 1.0 + 0j
    return cmath.exp(2j * cmath.pi * power / lam)


# -------------------------------------------------------------------
# INPUT SPECS
# -------------------------------------------------------------------
@dataclass(frozen=True)
class StructureFunctionSpec:
    """G(N) / F(N) of a GDOA.

    ``lam`` and ``alpha`` are only read for the C_lambda-extended kind,
    ``values`` (F(0), F(1), ...) only for the table kind.
    """

    kind: StructureKind
    lam: int | None = None
    alpha: tuple[float, ...] = ()
    values: tuple[float, ...] = ()


@dataclass(frozen=True)
class ComponentFunction:
    """One of the f_i(N): a polynomial in n (ascending coefficients) or a table over n."""

    kind: ComponentKind
    coeffs: tuple[complex, ...] = ()
    values: tuple[complex, ...] = ()

    MAX_DEGREE = 8

    @classmethod
    def constant(cls, value: complex = 1.0) -> "ComponentFunction":
        return cls(ComponentKind.POLY, coeffs=(complex(value),))

    @classmethod
    def shifted(cls, mu: int) -> "ComponentFunction":
        """f(n) = n - mu, the usual way to engineer a zero at n = mu."""
        return cls(ComponentKind.POLY, coeffs=(complex(-mu), 1.0 + 0j))

    def evaluate(self, n: np.ndarray) -> np.ndarray:
        """Evaluate at integer points. Tables hold their last value past the end."""
        n = np.asarray(n)
        if self.kind == ComponentKind.POLY:
            # np.polyval wants descending order
            return np.polyval(np.asarray(self.coeffs[::-1], dtype=complex), n.astype(float))
        table = np.asarray(self.values, dtype=complex)
        idx = np.clip(n, 0, len(table) - 1)
        return table[idx]


# -------------------------------------------------------------------
# FOCK REPRESENTATION
# -------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class FockRep:
    """Truncated Fock space |0>..|dim-1> of a GDOA with its Z_lambda grading.

    ``F_table`` covers n = 0 .. dim + lam - 1 so that every shifted argument
    used by the block operators is available; ``safe_dim`` bounds the leading
    block on which operator identities are exact under truncation.
    """

    spec: StructureFunctionSpec
    lam: int
    dim: int
    F_table: np.ndarray
    N_op: np.ndarray
    a_op: np.ndarray
    adag_op: np.ndarray
    T_op: np.ndarray
    projectors: tuple[np.ndarray, ...]
    safe_dim: int

    @property
    def q(self) -> complex:
        return root_of_unity(self.lam)

    def F(self, n) -> np.ndarray:
        """F at integer points, extended by F(m) = 0 for m < 0."""
        n = np.asarray(n)
        idx = np.clip(n, 0, len(self.F_table) - 1)
        return np.where(n >= 0, self.F_table[idx], 0.0)

    def G(self, n) -> np.ndarray:
        n = np.asarray(n)
        return self.F(n + 1) - self.F(n)

    def projector(self, mu: int) -> np.ndarray:
        """P_mu with the index taken mod lambda."""
        return self.projectors[mu % self.lam]


# -------------------------------------------------------------------
# FSSQM MODEL
# -------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class FssqmModel:
    """All lambda x lambda block operators of one FSSQM realization.

    Block matrices have size (lam * dim)^2 and use the tensor ordering
    ``block * dim + n``. Tables are indexed by n starting at 0:
    ``f_tables``/``g_tables``/``phi_table`` cover 0 .. dim + lam - 1,
    ``h_tables`` covers 0 .. dim - 1.
    """

    lam: int
    rep: FockRep
    f: tuple[ComponentFunction, ...]
    f_tables: np.ndarray
    g_tables: np.ndarray
    phi_table: np.ndarray
    h_tables: np.ndarray
    A: tuple[np.ndarray, ...]
    B: tuple[np.ndarray, ...]
    Q: np.ndarray
    D: np.ndarray
    H: np.ndarray
    tau: np.ndarray
    U: np.ndarray
    M: tuple[np.ndarray, ...] = ()
    m_tables: np.ndarray | None = None
    radicands: np.ndarray | None = None

    @property
    def q(self) -> complex:
        return root_of_unity(self.lam)

    @property
    def dim(self) -> int:
        return self.rep.dim

    @property
    def safe_dim(self) -> int:
        return self.rep.safe_dim

    def safe_indices(self) -> np.ndarray:
        """Tensor indices of the safe block in every one of the lambda blocks."""
        return np.concatenate(
            [b * self.dim + np.arange(self.safe_dim) for b in range(self.lam)]
        )


# -------------------------------------------------------------------
# REPORTS
# -------------------------------------------------------------------
@dataclass(frozen=True)
class MemberState:
    """A basis eigenvector |n> e_block (block is 1-based, as in the block notation)."""

    block: int
    fock: int
    grade: complex


@dataclass(frozen=True)
class Level:
    energy: float
    multiplicity: int
    members: tuple[MemberState, ...] = ()


@dataclass(frozen=True)
class SpectrumReport:
    levels: tuple[Level, ...]
    zero_tol: float


@dataclass(frozen=True)
class OrbitStep:
    """Q (or Q_mu) applied to ``source``: ``target`` is None when the state is annihilated."""

    source: MemberState | SectorState
    target: MemberState | SectorState | None
    amplitude: complex


@dataclass(frozen=True, eq=False)
class TopologyReport:
    grades: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    zero_mode_counts: tuple[int, ...]
    delta: np.ndarray
    # sector reports: residue class nu carrying grade index i (position i-1)
    residues: tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class SectorReport:
    mu: int
    H_mu: np.ndarray
    Q_mu: np.ndarray
    D_mu: np.ndarray
    tau_mu: np.ndarray
    M_mu: tuple[np.ndarray, ...]
    classification: SectorClass
    ground_degeneracy: int
    ground_energy: float
    charge_annihilates_ground: bool


@dataclass(frozen=True)
class SectorState:
    """|phi^(mu)_k, i> = |fock> with H_mu eigenvalue ``energy`` and tau_mu eigenvalue q^i."""

    k: int
    i: int
    fock: int
    energy: float
    grade: complex


@dataclass(frozen=True)
class UtsReport:
    """Outcome of the uniform topological symmetry conditions."""

    satisfied: bool
    type: tuple[int, ...]
    failures: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class RelationResult:
    name: str
    formula: str
    residual: float
    tolerance: float
    passed: bool

    @classmethod
    def check(cls, name: str, formula: str, residual: float, tolerance: float):
        return cls(name, formula, float(residual), float(tolerance), bool(residual <= tolerance))
