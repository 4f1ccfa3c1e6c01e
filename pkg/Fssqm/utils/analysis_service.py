"""Spectra, degeneracy structure, sector reduction and topological invariants.

Two independent routes are kept side by side: closed-form energies and
eigenvector families, and numbers read back from the assembled matrices
(eigenvalues, pivoted-QR null spaces). Callers compare them.
"""
from __future__ import annotations

import logging

import numpy as np

from Fssqm.errors import BlockMismatchError, DimensionError, SpectrumMismatchError
from Fssqm.models import (
    FssqmModel,
    Level,
    MemberState,
    OrbitStep,
    SectorClass,
    SectorReport,
    SectorState,
    SpectrumReport,
    TopologyReport,
    UtsReport,
    root_of_unity,
)
from Fssqm.utils.linalg import (
    DEFAULT_TOL,
    adjoint,
    block,
    hermitian_eigenvalues,
    inf_norm,
    nullspace_dim,
    restrict,
    scaled_residual,
)

log = logging.getLogger(__name__)

ZERO_TOL_REL = 1e-8


def grade(lam: int, i: int) -> complex:
    """c_i = q^i."""
    return root_of_unity(lam, i % lam)


def zero_tolerance(model: FssqmModel) -> float:
    """Absolute threshold for 'zero energy' and for grouping degenerate levels."""
    return ZERO_TOL_REL * (1.0 + inf_norm(restrict(model.H, model.safe_indices())))


def _amplitude_tol(model: FssqmModel, op: np.ndarray, idx: np.ndarray) -> float:
    return DEFAULT_TOL * (1.0 + inf_norm(restrict(op, idx)))


def _group(energies: np.ndarray, zero_tol: float) -> list[list[int]]:
    """Indices of ``energies`` (ascending) split wherever the gap exceeds zero_tol."""
    groups: list[list[int]] = []
    for k, e in enumerate(energies):
        if groups and e - energies[groups[-1][-1]] <= zero_tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def _snap(energy: float, zero_tol: float) -> float:
    return 0.0 if abs(energy) <= zero_tol else float(energy)


# ---------------------------------------------------------------------------
# Full-model spectrum
# ---------------------------------------------------------------------------
def ground_offsets(lam: int) -> list[int]:
    """d_j = j (2 lambda - j - 1) / 2 for j = 0 .. lambda - 1."""
    return [j * (2 * lam - j - 1) // 2 for j in range(lam)]


def ground_members(lam: int) -> tuple[MemberState, ...]:
    """|phi_0, i> = |i - d_{j-1} - 1> e_j with d_{j-1} + 1 <= i <= d_j."""
    d = ground_offsets(lam)
    members = []
    for j in range(1, lam):
        for i in range(d[j - 1] + 1, d[j] + 1):
            members.append(MemberState(block=j, fock=i - d[j - 1] - 1, grade=grade(lam, j)))
    return tuple(members)


def excited_members(lam: int, n: int) -> tuple[MemberState, ...]:
    """|phi_n, i> = |n + lambda - 1 - i> e_i."""
    return tuple(
        MemberState(block=i, fock=n + lam - 1 - i, grade=grade(lam, i)) for i in range(1, lam + 1)
    )


def excited_energy(model: FssqmModel, n: int) -> float:
    """E_n = phi(n + lambda - 2) prod_{j=1}^{lambda-1} F(n + lambda - 1 - j)."""
    lam = model.lam
    prod_F = np.prod([model.rep.F(n + lam - 1 - j) for j in range(1, lam)])
    return float((model.phi_table[n + lam - 2] * prod_F).real)


def complete_excited_range(model: FssqmModel) -> int:
    """Largest n whose whole multiplet |n + lambda - 1 - i> e_i lies in the safe block."""
    return model.safe_dim - model.lam + 1


def energy_cutoff(model: FssqmModel) -> float:
    """Lowest E_n among multiplets that the safe block only holds in part.

    Levels strictly below the cutoff are complete in both the closed form
    and the truncated matrix, whatever the ordering of E_n in n.
    """
    first = complete_excited_range(model) + 1
    return min(excited_energy(model, n) for n in range(first, model.dim + 1))


def analytic_spectrum(model: FssqmModel, n_levels: int) -> SpectrumReport:
    lam = model.lam
    if n_levels * lam > model.safe_dim:
        required = n_levels * lam + 2 * lam
        raise DimensionError(
            f"{n_levels} levels need fock_dimension >= {required} (have {model.dim})",
            required=required,
        )
    zero_tol = zero_tolerance(model)
    if n_levels == 0:
        return SpectrumReport(levels=(), zero_tol=zero_tol)

    cutoff = energy_cutoff(model) - zero_tol
    ground = ground_members(lam)
    excited = sorted(
        (
            (e, excited_members(lam, n))
            for n in range(1, complete_excited_range(model) + 1)
            if (e := excited_energy(model, n)) < cutoff
        ),
        key=lambda item: item[0],
    )
    levels = [Level(energy=0.0, multiplicity=len(ground), members=ground)]
    energies = np.array([e for e, _ in excited])
    for group in _group(energies, zero_tol):
        members = tuple(m for k in group for m in excited[k][1])
        levels.append(Level(float(energies[group[0]]), len(members), members))
    return SpectrumReport(levels=tuple(levels[:n_levels]), zero_tol=zero_tol)


def numeric_spectrum(model: FssqmModel, n_levels: int) -> SpectrumReport:
    """Eigenvalues of H on the safe block below the truncation cutoff, grouped.

    Members are read back from H's diagonal.
    """
    idx = model.safe_indices()
    Hs = restrict(model.H, idx)
    zero_tol = zero_tolerance(model)
    eig = hermitian_eigenvalues(Hs)
    eig = eig[eig < energy_cutoff(model) - zero_tol]
    diag = Hs.diagonal().real
    levels = []
    for group in _group(eig, zero_tol)[:n_levels]:
        energy = _snap(float(np.mean(eig[group])), zero_tol)
        hits = np.flatnonzero(np.abs(diag - energy) <= zero_tol)
        members = tuple(
            MemberState(
                block=int(idx[k] // model.dim) + 1,
                fock=int(idx[k] % model.dim),
                grade=grade(model.lam, int(idx[k] // model.dim) + 1),
            )
            for k in hits
        )
        if len(members) != len(group):
            log.warning("level E=%g: %d eigenvalues but %d diagonal entries",
                        energy, len(group), len(members))
        levels.append(Level(energy, len(group), members))
    return SpectrumReport(levels=tuple(levels), zero_tol=zero_tol)


def spectrum_mismatches(analytic: SpectrumReport, numeric: SpectrumReport,
                        tol: float = DEFAULT_TOL) -> list[str]:
    problems = []
    if len(analytic.levels) != len(numeric.levels):
        problems.append(f"level count {len(analytic.levels)} != {len(numeric.levels)}")
    for k, (a, b) in enumerate(zip(analytic.levels, numeric.levels)):
        if abs(a.energy - b.energy) > tol * (1.0 + abs(a.energy)):
            problems.append(f"level {k}: energy {a.energy:.12g} != {b.energy:.12g}")
        if a.multiplicity != b.multiplicity:
            problems.append(f"level {k}: multiplicity {a.multiplicity} != {b.multiplicity}")
    return problems


def assert_spectra_agree(analytic: SpectrumReport, numeric: SpectrumReport,
                         tol: float = DEFAULT_TOL) -> None:
    problems = spectrum_mismatches(analytic, numeric, tol)
    if problems:
        raise SpectrumMismatchError("; ".join(problems))


def eigenvector(model: FssqmModel, member: MemberState) -> np.ndarray:
    v = np.zeros(model.lam * model.dim, dtype=complex)
    v[(member.block - 1) * model.dim + member.fock] = 1.0
    return v


def supercharge_orbit(model: FssqmModel, level: Level) -> tuple[OrbitStep, ...]:
    """Q applied to every member of ``level``: target state and amplitude, or annihilation."""
    tol = _amplitude_tol(model, model.Q, model.safe_indices())
    by_index = {(m.block, m.fock): m for m in level.members}
    steps = []
    for member in level.members:
        w = model.Q @ eigenvector(model, member)
        k = int(np.argmax(np.abs(w)))
        if abs(w[k]) <= tol:
            steps.append(OrbitStep(member, None, 0j))
            continue
        b, n = k // model.dim + 1, k % model.dim
        target = by_index.get((b, n), MemberState(b, n, grade(model.lam, b)))
        steps.append(OrbitStep(member, target, complex(w[k])))
    return tuple(steps)


def is_cyclic(orbit: tuple[OrbitStep, ...]) -> bool:
    """True when Q permutes the members in a single cycle through all of them."""
    if not orbit or any(step.target is None for step in orbit):
        return False
    succ = {(s.source.block, s.source.fock): (s.target.block, s.target.fock) for s in orbit}
    start = next(iter(succ))
    seen, node = set(), start
    while node in succ and node not in seen:
        seen.add(node)
        node = succ[node]
    return node == start and len(seen) == len(succ)


# ---------------------------------------------------------------------------
# Sector reduction
# ---------------------------------------------------------------------------
def grade_index(lam: int, mu: int, n: int) -> int:
    """i in 1..lambda with F_nu (nu = n mod lambda) carrying grade q^{mu - nu + 1} = q^i."""
    return (mu - n % lam) % lam + 1


def sector_diagonal(model: FssqmModel, mu: int) -> np.ndarray:
    """Diagonal of H_mu: h_i(n) with i = grade_index(mu, n)."""
    n = np.arange(model.dim)
    rows = np.array([grade_index(model.lam, mu, k) - 1 for k in n])
    return model.h_tables[rows, n]


def classify_sector(model: FssqmModel, mu: int) -> SectorClass:
    lam = model.lam
    if mu == 0:
        return SectorClass.UNBROKEN_NONDEGENERATE
    if mu == lam - 1:
        return SectorClass.BROKEN_POSITIVE_ENERGY
    values = np.abs(model.f_tables[:mu, mu])
    scale = 1.0 + np.abs(model.f_tables[:, mu]).max()
    if np.all(values <= ZERO_TOL_REL * scale):
        return SectorClass.UNBROKEN_DEGENERATE
    return SectorClass.BROKEN_ZERO_ENERGY


def _sector_sum(model: FssqmModel, blocks, mu: int) -> np.ndarray:
    """sum_i X_i P_{mu - i + 1}."""
    return sum(X @ model.rep.projector(mu - i + 1) for i, X in enumerate(blocks, start=1))


def full_operators(model: FssqmModel) -> dict[str, np.ndarray]:
    ops = {"H": model.H, "Q": model.Q, "D": model.D, "tau": model.tau}
    ops.update({f"M_{i}": M for i, M in enumerate(model.M, start=1)})
    return ops


def sector_block_residuals(model: FssqmModel, mu: int,
                           reduced: dict[str, np.ndarray]) -> dict[str, float]:
    """Scaled distance between each X_mu and diagonal block mu of U X U^dag (safe columns)."""
    cols = np.arange(model.safe_dim)
    U, Ud = model.U, adjoint(model.U)
    full = full_operators(model)
    return {
        name: scaled_residual(block(U @ full[name] @ Ud, mu, mu, model.dim), X, cols)
        for name, X in reduced.items()
    }


def reduce_sector(model: FssqmModel, mu: int, tol: float = DEFAULT_TOL) -> SectorReport:
    """H_mu, Q_mu, D_mu, tau_mu and M_{i,mu}, cross-checked against U X U^dag.

    Raises BlockMismatchError when a block disagrees by more than ``tol``;
    pass ``tol=float("inf")`` to skip the check.
    """
    lam, dim, rep = model.lam, model.dim, model.rep
    if not 0 <= mu < lam:
        raise DimensionError(f"sector index mu must be in 0..{lam - 1}, got {mu}")

    H_mu = _sector_sum(model, [np.diag(h) for h in model.h_tables], mu).astype(complex)
    Q_mu = _sector_sum(model, model.A, mu)
    D_mu = _sector_sum(model, model.B, mu)
    tau_mu = grade(lam, mu + 1) * adjoint(rep.T_op)
    M_mu = tuple(
        0.5 * _sector_sum(model, [np.diag(row[j:j + dim]) for j in range(lam)], mu)
        for row in (model.m_tables if model.m_tables is not None else ())
    )

    cols = np.arange(model.safe_dim)
    reduced = {"H": H_mu, "Q": Q_mu, "D": D_mu, "tau": tau_mu}
    reduced.update({f"M_{i}": M for i, M in enumerate(M_mu, start=1)})
    for name, residual in sector_block_residuals(model, mu, reduced).items():
        if residual > tol:
            raise BlockMismatchError(
                f"{name}_{mu} differs from block {mu} of U {name} U^dag by {residual:.3e}"
            )

    zero_tol = zero_tolerance(model)
    diag = H_mu.diagonal().real[cols]
    eig = hermitian_eigenvalues(restrict(H_mu, cols))
    ground_energy = _snap(float(eig[0]), zero_tol)
    ground = np.flatnonzero(diag <= ground_energy + zero_tol)
    amp_tol = _amplitude_tol(model, Q_mu, cols)
    annihilates = all(np.abs(Q_mu[:, n]).max() <= amp_tol for n in ground)

    return SectorReport(
        mu=mu,
        H_mu=H_mu,
        Q_mu=Q_mu,
        D_mu=D_mu,
        tau_mu=tau_mu,
        M_mu=M_mu,
        classification=classify_sector(model, mu),
        ground_degeneracy=int(np.count_nonzero(eig <= eig[0] + zero_tol)),
        ground_energy=ground_energy,
        charge_annihilates_ground=bool(annihilates),
    )


def sector_energy(model: FssqmModel, mu: int, n: int) -> float:
    """E^(mu)_n with n = lambda k + nu, from the two-branch closed form."""
    lam = model.lam
    k, nu = divmod(n, lam)
    base = lam * k + mu if nu <= mu else lam * (k + 1) + mu
    prod_F = np.prod([model.rep.F(base - i + 1) for i in range(1, lam)])
    return float((model.phi_table[base] * prod_F).real)


def sector_spectrum_formula(model: FssqmModel, mu: int, k_max: int,
                            tol: float = DEFAULT_TOL, check: bool = True) -> list[float]:
    """E^(mu)_n for n = 0 .. lambda (k_max + 1) - 1, checked against H_mu's diagonal."""
    lam = model.lam
    if lam * k_max + lam > model.safe_dim:
        required = lam * (k_max + 1) + 2 * lam
        raise DimensionError(f"k_max={k_max} needs fock_dimension >= {required}", required=required)
    energies = [sector_energy(model, mu, n) for n in range(lam * (k_max + 1))]
    if check:
        diag = sector_diagonal(model, mu)
        bad = [n for n, e in enumerate(energies) if abs(e - diag[n]) > tol * (1.0 + abs(e))]
        if bad:
            n = bad[0]
            raise SpectrumMismatchError(
                f"E^({mu})_{n} = {energies[n]:.12g} but H_{mu} has {diag[n]:.12g}"
            )
    return energies


def sector_states(model: FssqmModel, mu: int, k_max: int) -> tuple[SectorState, ...]:
    """Eigenvector families of H_mu; each state has tau_mu eigenvalue q^i."""
    lam = model.lam
    states = []
    if mu <= lam - 2:
        for i in range(1, mu + 2):
            states.append(SectorState(0, i, mu + 1 - i, 0.0, grade(lam, i)))
        for k in range(1, k_max + 1):
            energy = sector_energy(model, mu, lam * k + mu)
            states.extend(
                SectorState(k, i, lam * k + mu + 1 - i, energy, grade(lam, i))
                for i in range(1, lam + 1)
            )
    else:
        for k in range(k_max + 1):
            energy = sector_energy(model, mu, lam * k)
            states.extend(
                SectorState(k, i, lam * (k + 1) - i, energy, grade(lam, i))
                for i in range(1, lam + 1)
            )
    top = max(s.fock for s in states)
    if top >= model.safe_dim:
        raise DimensionError(f"sector states up to |{top}> leave the safe block",
                             required=top + 1 + 2 * lam)
    return tuple(states)


def sector_orbit(model: FssqmModel, mu: int, report: SectorReport | None = None) -> tuple[OrbitStep, ...]:
    """Q_mu on the zero-energy states |mu + 1 - i>, i = 1..mu+1 (empty for mu = lambda - 1)."""
    report = report or reduce_sector(model, mu)
    cols = np.arange(model.safe_dim)
    tol = _amplitude_tol(model, report.Q_mu, cols)
    ground = [s for s in sector_states(model, mu, 0) if s.k == 0 and s.energy == 0.0]
    if mu == model.lam - 1:
        ground = []
    by_fock = {s.fock: s for s in ground}
    steps = []
    for state in ground:
        w = report.Q_mu[:, state.fock]
        k = int(np.argmax(np.abs(w)))
        if abs(w[k]) <= tol:
            steps.append(OrbitStep(state, None, 0j))
        else:
            steps.append(OrbitStep(state, by_fock.get(k), complex(w[k])))
    return tuple(steps)


# ---------------------------------------------------------------------------
# Topological invariants
# ---------------------------------------------------------------------------
def delta_matrix(multiplicities, counts) -> np.ndarray:
    """Delta_ij = m_i n_j - m_j n_i."""
    m = np.asarray(multiplicities, dtype=int)
    n = np.asarray(counts, dtype=int)
    return np.outer(m, n) - np.outer(n, m)


def expected_delta(lam: int) -> np.ndarray:
    """Delta_ij = i - j."""
    i = np.arange(1, lam + 1)
    return i[:, None] - i[None, :]


def expected_sector_delta(lam: int, mu: int) -> np.ndarray:
    """-1 for i <= mu + 1 < j, antisymmetric, 0 elsewhere (all zero for mu = lambda - 1)."""
    out = np.zeros((lam, lam), dtype=int)
    if mu == lam - 1:
        return out
    for i in range(1, lam + 1):
        for j in range(i + 1, lam + 1):
            if i <= mu + 1 < j:
                out[i - 1, j - 1], out[j - 1, i - 1] = -1, 1
    return out


def topological_invariants(model: FssqmModel, tol: float = DEFAULT_TOL) -> TopologyReport:
    """Zero modes of H per grade c_i = q^i (block row i), counted by pivoted QR."""
    lam, dim, s = model.lam, model.dim, model.safe_dim
    counts = tuple(
        nullspace_dim(block(model.H, i, i, dim)[:s, :s], tol) for i in range(lam)
    )
    multiplicities = (1,) * lam
    return TopologyReport(
        grades=tuple(grade(lam, i) for i in range(1, lam + 1)),
        multiplicities=multiplicities,
        zero_mode_counts=counts,
        delta=delta_matrix(multiplicities, counts),
    )


def sector_invariants(model: FssqmModel, mu: int, tol: float = DEFAULT_TOL,
                      report: SectorReport | None = None) -> TopologyReport:
    """Zero modes of H_mu per grade; F_nu carries c^(mu)_nu = q^{mu - nu + 1}."""
    lam = model.lam
    report = report or reduce_sector(model, mu)
    n = np.arange(model.safe_dim)
    residues, counts = [], []
    for i in range(1, lam + 1):
        nu = (mu + 1 - i) % lam
        residues.append(nu)
        counts.append(nullspace_dim(restrict(report.H_mu, n[n % lam == nu]), tol))
    multiplicities = (1,) * lam
    return TopologyReport(
        grades=tuple(grade(lam, i) for i in range(1, lam + 1)),
        multiplicities=multiplicities,
        zero_mode_counts=tuple(counts),
        delta=delta_matrix(multiplicities, counts),
        residues=tuple(residues),
    )


# ---------------------------------------------------------------------------
# Uniform topological symmetry of type (1, ..., 1)
# ---------------------------------------------------------------------------
def _uts_from_levels(lam: int, levels: list[tuple[float, list[int]]], zero_tol: float) -> UtsReport:
    """Nonnegative energies, and every positive level spanned by whole (1, ..., 1) multiplets.

    Accidental coincidences of several multiplets show up as k states of every grade.
    """
    failures = []
    if levels and levels[0][0] < -zero_tol:
        failures.append(f"negative energy {levels[0][0]:.6g}")
    for energy, grades in levels:
        if energy <= zero_tol:
            continue
        counts = np.bincount(np.asarray(grades) - 1, minlength=lam)
        if len(counts) != lam or counts.min() == 0 or counts.min() != counts.max():
            failures.append(f"level E={energy:.6g} has grades {sorted(grades)}")
    return UtsReport(satisfied=not failures, type=(1,) * lam, failures=tuple(failures))


def uts_check(model: FssqmModel) -> UtsReport:
    lam = model.lam
    report = numeric_spectrum(model, model.safe_dim)
    levels = [(lvl.energy, [m.block for m in lvl.members]) for lvl in report.levels]
    out = _uts_from_levels(lam, levels, report.zero_tol)
    commutes = scaled_residual(model.H @ model.tau, model.tau @ model.H, model.safe_indices())
    if commutes > DEFAULT_TOL:
        return UtsReport(False, out.type, out.failures + (f"[H, tau] = {commutes:.3e}",))
    return out


def sector_levels(model: FssqmModel, mu: int) -> list[tuple[float, list[int]]]:
    """Levels of H_mu on the safe block as (energy, Fock indices), complete multiplets only.

    A multiplet cut by the safe boundary has a member at Fock >= safe_dim, so
    everything strictly below the lowest such energy is whole.
    """
    full = sector_diagonal(model, mu)
    zero_tol = zero_tolerance(model)
    cutoff = float(full[model.safe_dim:].min()) - zero_tol
    diag = full[: model.safe_dim]
    order = np.argsort(diag, kind="stable")
    order = order[diag[order] < cutoff]
    return [
        (_snap(float(diag[order[g[0]]]), zero_tol), [int(order[k]) for k in g])
        for g in _group(diag[order], zero_tol)
    ]


def sector_uts_check(model: FssqmModel, mu: int) -> UtsReport:
    lam = model.lam
    levels = [
        (energy, [grade_index(lam, mu, n) for n in fock])
        for energy, fock in sector_levels(model, mu)
    ]
    return _uts_from_levels(lam, levels, zero_tolerance(model))
