"""Closed-form eigenstates and energies of the open nearest-neighbor chain.

For modes ``1 <= g_1 < ... < g_M <= N`` the eigenstate amplitude on the ket
``|k_1, ..., k_M>`` is the antisymmetrized product of sines

    C = sum_sigma sgn(sigma) prod_b sin(g_sigma(b) * k_b * theta),  theta = pi / (N + 1)

which is the determinant of the M x M matrix ``sin(g_a k_b theta)``. The
energy is ``M * omega0 + 2 * omega * sum_i cos(g_i * theta)``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from . import basis
from .errors import DomainError, ResourceError, check_dim
from .numerics import determinant_lu

PERMUTATION_SUM_MAX_M = 8
_BATCH = 8192


@dataclass(frozen=True)
class Eigenstate:
    mode: tuple
    amplitudes: np.ndarray
    energy: float
    normalized: bool


def validate_mode(mode, n_atoms):
    mode = tuple(mode)
    if any(not isinstance(g, (int, np.integer)) for g in mode):
        raise DomainError(f"mode {mode} must contain integers")
    mode = tuple(int(g) for g in mode)
    if not 0 <= len(mode) <= n_atoms:
        raise DomainError(f"mode {mode} has more entries than N={n_atoms}")
    for a, b in zip(mode, mode[1:]):
        if not a < b:
            raise DomainError(f"mode {mode} is not strictly increasing")
    if mode and not (1 <= mode[0] and mode[-1] <= n_atoms):
        raise DomainError(f"mode {mode} has entries outside [1, {n_atoms}]")
    return mode


def mode_tuples(n_atoms, n_excitations):
    """Eigenstate labels of level M in lexicographic order."""
    check_dim(basis.subspace_dimension(n_atoms, n_excitations), "mode set")
    return list(combinations(range(1, n_atoms + 1), n_excitations))


@lru_cache(maxsize=256)
def sine_table(n_atoms):
    """``table[j] = sin(j * pi / (N + 1))`` for ``j`` in ``[0, 2(N+1))``.

    Built so that ``table[0] = table[N+1] = 0`` exactly and
    ``table[2(N+1) - j] = -table[j]`` exactly; callers reduce ``g * k``
    modulo ``2(N+1)`` in integers before the lookup.
    """
    period = 2 * (n_atoms + 1)
    half = n_atoms + 1
    table = np.zeros(period)
    for j in range(1, half):
        # fold to the nearer end of [0, pi] so the argument stays small
        folded = min(j, half - j)
        table[j] = math.sin(math.pi * folded / half)
        table[period - j] = -table[j]
    table.setflags(write=False)
    return table


def cos_theta(g, n_atoms):
    """``cos(g * pi / (N + 1))`` with exact antisymmetry ``cos(g) = -cos(N + 1 - g)``."""
    half = n_atoms + 1
    g = g % (2 * half)
    if g > half:
        g = 2 * half - g
    if 2 * g == half:
        return 0.0
    if 2 * g > half:
        return -cos_theta(half - g, n_atoms)
    return math.cos(math.pi * g / half)


def sine_matrices(mode, patterns, n_atoms):
    """Stack of matrices ``A[p, a, b] = sin(g_a * k_{p,b} * theta)``.

    ``patterns`` is an integer array of shape (P, M); entries need not be
    sorted or in range, which lets the recurrence check evaluate invalid kets.
    """
    g = np.asarray(mode, dtype=np.int64)
    k = np.asarray(patterns, dtype=np.int64)
    idx = (g[None, :, None] * k[:, None, :]) % (2 * (n_atoms + 1))
    return sine_table(n_atoms)[idx]


def coefficient_array(mode, patterns, n_atoms):
    """Determinant coefficients for many kets at once; ``patterns`` has shape (P, M)."""
    mode = tuple(mode)
    k = np.asarray(patterns, dtype=np.int64)
    if k.ndim != 2:
        k = k.reshape((k.shape[0] if k.size else 0, len(mode)))
    if k.shape[1] != len(mode):
        raise DomainError(f"mode length {len(mode)} differs from pattern length {k.shape[1]}")
    if not mode:
        return np.ones(k.shape[0])
    out = np.empty(k.shape[0])
    for start in range(0, k.shape[0], _BATCH):
        chunk = k[start : start + _BATCH]
        out[start : start + chunk.shape[0]] = determinant_lu(sine_matrices(mode, chunk, n_atoms))
    return out


def coefficient(mode, pattern, n_atoms):
    """Amplitude of ket ``pattern`` in the unnormalized eigenstate ``mode``."""
    mode, pattern = tuple(mode), tuple(pattern)
    if len(mode) != len(pattern):
        raise DomainError(f"mode {mode} and pattern {pattern} differ in length")
    return float(coefficient_array(mode, [pattern], n_atoms)[0])


def permutation_parity(perm):
    """+1 for even permutations of ``range(len(perm))``, -1 for odd, 0 with repeats."""
    perm = list(perm)
    if len(set(perm)) != len(perm):
        return 0
    inversions = sum(1 for i, j in combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def coefficient_permutation_sum(mode, pattern, n_atoms):
    """Literal Levi-Civita sum over all M! index permutations; test oracle only."""
    mode, pattern = tuple(mode), tuple(pattern)
    if len(mode) != len(pattern):
        raise DomainError(f"mode {mode} and pattern {pattern} differ in length")
    m = len(mode)
    if m > PERMUTATION_SUM_MAX_M:
        raise ResourceError(f"permutation sum over {m}! terms refused (M <= {PERMUTATION_SUM_MAX_M})")
    theta = math.pi / (n_atoms + 1)
    total = 0.0
    for perm in permutations(range(m)):
        term = float(permutation_parity(perm))
        for b, a in enumerate(perm):
            term *= math.sin(mode[a] * pattern[b] * theta)
        total += term
    return total


def energy_shift(mode, cfg):
    """Dipole-dipole shift ``2 * omega * sum_i cos(g_i * theta)``."""
    return 2.0 * cfg.omega * math.fsum(cos_theta(g, cfg.n_atoms) for g in mode)


def energy(mode, cfg):
    """Eigenvalue in the ``M * omega0`` level convention."""
    mode = validate_mode(mode, cfg.n_atoms)
    return len(mode) * cfg.omega0 + energy_shift(mode, cfg)


def eigenstate(mode, cfg, normalize=True):
    """Analytic eigenstate, amplitudes indexed by lexicographic pattern rank."""
    mode = validate_mode(mode, cfg.n_atoms)
    check_dim(basis.subspace_dimension(cfg.n_atoms, len(mode)))
    amps = coefficient_array(mode, basis.pattern_array(cfg.n_atoms, len(mode)), cfg.n_atoms)
    if normalize:
        amps = amps / math.sqrt(math.fsum(amps * amps))
    amps.setflags(write=False)
    return Eigenstate(mode, amps, energy(mode, cfg), normalize)


def full_spectrum(cfg, n_excitations):
    """``(mode, energy)`` for every mode of level M, modes in lexicographic order."""
    return [(g, energy(g, cfg)) for g in mode_tuples(cfg.n_atoms, n_excitations)]


@lru_cache(maxsize=64)
def _eigenbasis(n_atoms, n_excitations):
    cfg_modes = mode_tuples(n_atoms, n_excitations)
    pats = basis.pattern_array(n_atoms, n_excitations)
    cols = []
    for g in cfg_modes:
        amps = coefficient_array(g, pats, n_atoms)
        cols.append(amps / math.sqrt(math.fsum(amps * amps)))
    u = np.array(cols).T.reshape(len(pats), len(cfg_modes))
    u.setflags(write=False)
    return u


def eigenbasis(n_atoms, n_excitations):
    """Orthogonal matrix whose column j is the normalized eigenstate of ``mode_tuples(...)[j]``."""
    check_dim(basis.subspace_dimension(n_atoms, n_excitations))
    return _eigenbasis(n_atoms, n_excitations)


def squared_norm_closed_form(n_atoms, n_excitations):
    """Squared norm of every unnormalized eigenstate, ``((N + 1) / 2) ** M``."""
    return ((n_atoms + 1) / 2) ** n_excitations
