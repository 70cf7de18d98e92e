"""Cross-checks of the closed-form solution against the operator path.

Checks compare residuals, spectra and eigenspace projectors. Eigenvectors
are never compared one by one with the Jacobi output, since degenerate
levels only fix them up to a rotation inside each eigenspace.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import analytic, basis, operators
from .errors import FULL_SPACE_MAX_ATOMS, DomainError
from .numerics import gram_matrix, jacobi_eigh, max_abs, norm

RESIDUAL_TOL = 1e-10
RECURRENCE_TOL = 1e-10
COMMUTATOR_TOL = 1e-12
ORTHONORMALITY_TOL = 1e-10
SPECTRUM_TOL = 1e-9
PROJECTOR_TOL = 1e-8
DEGENERACY_TOL = 1e-9


@dataclass
class VerificationReport:
    check: str
    n_atoms: int
    n_excitations: int | None
    max_deviation: float
    tolerance: float
    details: list = field(default_factory=list)

    @property
    def passed(self):
        return bool(self.max_deviation <= self.tolerance)

    def to_dict(self):
        return {
            "check": self.check,
            "N": self.n_atoms,
            "M": self.n_excitations,
            "max_deviation": float(self.max_deviation),
            "tolerance": float(self.tolerance),
            "passed": self.passed,
            "details": [[label, value] for label, value in self.details],
        }


def residual(mode, cfg, state=None):
    """``||V psi - dE psi|| / ||psi||`` for the analytic state of ``mode``.

    ``state`` substitutes another vector for psi (used to probe sensitivity).
    """
    mode = analytic.validate_mode(mode, cfg.n_atoms)
    psi = analytic.eigenstate(mode, cfg).amplitudes if state is None else np.asarray(state)
    v = operators.cached_subspace_V(cfg, len(mode))
    shift = analytic.energy_shift(mode, cfg)
    return norm(operators.matvec(v, psi) - shift * psi) / norm(psi)


def _shifted(patterns, slot, direction):
    out = np.array(patterns, dtype=np.int64)
    out[:, slot] += direction
    return out


def recurrence_check(mode, n_atoms):
    """Largest violation of ``dE C(k) = sum_j [C(.., k_j + 1, ..) + C(.., k_j - 1, ..)]``.

    Units omega = 1. Neighbor kets with an index at 0, N + 1, or colliding with
    another index are kept in the sum and evaluated by the sine formula.
    """
    mode = analytic.validate_mode(mode, n_atoms)
    m = len(mode)
    pats = basis.pattern_array(n_atoms, m)
    c = analytic.coefficient_array(mode, pats, n_atoms)
    shift = 2.0 * math.fsum(analytic.cos_theta(g, n_atoms) for g in mode)
    rhs = np.zeros_like(c)
    for slot in range(m):
        for direction in (1, -1):
            rhs += analytic.coefficient_array(mode, _shifted(pats, slot, direction), n_atoms)
    return max_abs(shift * c - rhs)


def commutator_residual(cfg, perturbation=None, chunk=256):
    """Max-norm of ``(H0 V - V H0) e_b`` over every full-space basis vector ``e_b``.

    ``perturbation`` is added to V before the check.
    """
    h0 = operators.build_full_H0(cfg)
    v = operators.build_full_V(cfg)
    if perturbation is not None:
        v = v + perturbation
    dim = h0.dim
    worst = 0.0
    for start in range(0, dim, chunk):
        stop = min(start + chunk, dim)
        block = np.zeros((dim, stop - start))
        block[np.arange(start, stop), np.arange(stop - start)] = 1.0
        comm = operators.matvec(h0, operators.matvec(v, block)) - operators.matvec(
            v, operators.matvec(h0, block)
        )
        worst = max(worst, max_abs(comm))
    return worst


def orthonormality(cfg, n_excitations, tol=ORTHONORMALITY_TOL):
    modes = analytic.mode_tuples(cfg.n_atoms, n_excitations)
    states = [analytic.eigenstate(g, cfg).amplitudes for g in modes]
    gram = gram_matrix(states)
    dev = max_abs(gram - np.eye(len(states)))
    return VerificationReport(
        "orthonormality", cfg.n_atoms, n_excitations, dev, tol, [("states", len(states))]
    )


def group_degenerate(energies, tol):
    """Cluster sorted energies: a gap larger than ``tol`` starts a new group.

    Returns lists of indices into ``energies``, groups ordered by energy.
    """
    energies = np.asarray(energies, dtype=float)
    order = np.argsort(energies, kind="stable")
    groups = []
    for i in order:
        if groups and energies[i] - energies[groups[-1][-1]] <= tol:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    return groups


def grouping_tolerance(cfg):
    return DEGENERACY_TOL * max(1.0, abs(cfg.omega))


@lru_cache(maxsize=256)
def _oracle(cfg, n_excitations):
    h = operators.cached_subspace_H(cfg, n_excitations).to_dense()
    dec = jacobi_eigh(h)
    return dec.eigenvalues + cfg.level_offset, dec


def spectrum_match(cfg, n_excitations, tol=SPECTRUM_TOL):
    """Sorted analytic energies against Jacobi eigenvalues of the H block."""
    ana = np.sort([e for _, e in analytic.full_spectrum(cfg, n_excitations)])
    num, dec = _oracle(cfg, n_excitations)
    dev = max_abs(ana - num)
    return VerificationReport(
        "spectrum_match",
        cfg.n_atoms,
        n_excitations,
        dev,
        tol,
        [("states", int(ana.size)), ("jacobi_sweeps", dec.sweeps)],
    )


def projector_match(cfg, n_excitations, tol=PROJECTOR_TOL):
    """Frobenius distance between analytic and Jacobi projectors, per degenerate group."""
    spectrum = analytic.full_spectrum(cfg, n_excitations)
    ana_e = np.array([e for _, e in spectrum])
    u = analytic.eigenbasis(cfg.n_atoms, n_excitations)
    num_e, dec = _oracle(cfg, n_excitations)
    gtol = grouping_tolerance(cfg)
    ana_groups = group_degenerate(ana_e, gtol)
    num_groups = group_degenerate(num_e, gtol)
    sizes = [len(g) for g in ana_groups]
    if sizes != [len(g) for g in num_groups]:
        return VerificationReport(
            "projector_match", cfg.n_atoms, n_excitations, math.inf, tol,
            [("group_sizes", sizes), ("error", "degeneracy structure differs")],
        )
    worst = 0.0
    for ga, gn in zip(ana_groups, num_groups):
        pa = u[:, ga] @ u[:, ga].T
        vn = dec.eigenvectors[:, gn]
        pn = vn @ vn.T
        worst = max(worst, float(np.sqrt(np.sum((pa - pn) ** 2))))
    return VerificationReport(
        "projector_match", cfg.n_atoms, n_excitations, worst, tol,
        [("groups", len(sizes)), ("largest_group", max(sizes))],
    )


def residual_report(cfg, n_excitations, tol=RESIDUAL_TOL):
    modes = analytic.mode_tuples(cfg.n_atoms, n_excitations)
    worst = max(residual(g, cfg) for g in modes)
    return VerificationReport(
        "eigen_residual", cfg.n_atoms, n_excitations, worst, tol, [("states", len(modes))]
    )


def recurrence_report(cfg, n_excitations, tol=RECURRENCE_TOL):
    modes = analytic.mode_tuples(cfg.n_atoms, n_excitations)
    worst = max(recurrence_check(g, cfg.n_atoms) for g in modes)
    return VerificationReport(
        "recurrence", cfg.n_atoms, n_excitations, worst, tol, [("states", len(modes))]
    )


def commutator_report(cfg, tol=COMMUTATOR_TOL):
    dev = commutator_residual(cfg)
    return VerificationReport(
        "commutator", cfg.n_atoms, None, dev, tol, [("basis_vectors", 2**cfg.n_atoms)]
    )


def degeneracy_census(cfg):
    """Level counts against binomial(N, M) plus degenerate-group sizes of each level."""
    n = cfg.n_atoms
    counts = [len(analytic.mode_tuples(n, m)) for m in range(n + 1)]
    dev = max(abs(c - basis.subspace_dimension(n, m)) for m, c in enumerate(counts))
    dev = max(dev, abs(sum(counts) - 2**n))
    gtol = grouping_tolerance(cfg)
    groups = []
    for m in range(n + 1):
        energies = [e for _, e in analytic.full_spectrum(cfg, m)]
        groups.append(sorted((len(g) for g in group_degenerate(energies, gtol)), reverse=True))
    return VerificationReport(
        "degeneracy_census", n, None, float(dev), 0.0,
        [("level_counts", counts), ("total", sum(counts)),
         ("group_sizes", groups), ("grouping_tolerance", gtol)],
    )


def run_suite(cfg, levels=None, tol=None):
    """Every check for the given levels (default: all), then the level-free checks.

    ``tol`` overrides every check's tolerance.
    """
    n = cfg.n_atoms
    if levels is None:
        levels = range(n + 1)
    levels = list(levels)
    for m in levels:
        basis.subspace_dimension(n, m)

    def pick(default):
        return default if tol is None else tol

    reports = []
    for m in levels:
        reports.append(residual_report(cfg, m, pick(RESIDUAL_TOL)))
        reports.append(recurrence_report(cfg, m, pick(RECURRENCE_TOL)))
        reports.append(orthonormality(cfg, m, pick(ORTHONORMALITY_TOL)))
        reports.append(spectrum_match(cfg, m, pick(SPECTRUM_TOL)))
        reports.append(projector_match(cfg, m, pick(PROJECTOR_TOL)))
    if n <= FULL_SPACE_MAX_ATOMS:
        reports.append(commutator_report(cfg, pick(COMMUTATOR_TOL)))
    census = degeneracy_census(cfg)
    if tol is not None:
        census.tolerance = tol
    reports.append(census)
    return reports


def spectrum_deviation(energies_a, energies_b):
    """Max pairwise gap between two spectra compared as sorted multisets."""
    a, b = np.sort(np.asarray(energies_a, float)), np.sort(np.asarray(energies_b, float))
    if a.shape != b.shape:
        raise DomainError(f"spectra have different sizes {a.size} and {b.size}")
    return max_abs(a - b)
