"""Sparse matrices for H = H0 + V on a subspace W^M or on the full 2^N space.

This is the numerical path that never looks at the closed-form solution:
matrix elements come from applying nearest-neighbor hops to basis kets.

Bare energies use S^z eigenvalues +-1/2, so an M-excitation ket sits at
``omega0 * (M - N/2)``. Reported energies elsewhere add ``N * omega0 / 2``
to match the level convention ``E0 = M * omega0``.
"""

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import basis
from .errors import FULL_SPACE_MAX_ATOMS, DomainError, ResourceError, check_dim


@dataclass(frozen=True)
class ChainConfig:
    """N equally spaced two-level atoms with transition frequency omega0 and
    nearest-neighbor dipole coupling omega (hbar = 1)."""

    n_atoms: int
    omega0: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if not isinstance(self.n_atoms, int) or isinstance(self.n_atoms, bool) or self.n_atoms < 1:
            raise DomainError(f"n_atoms must be an integer >= 1, got {self.n_atoms!r}")
        for name in ("omega0", "omega"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite real, got {value!r}")
            object.__setattr__(self, name, float(value))

    @property
    def theta(self):
        return math.pi / (self.n_atoms + 1)

    @property
    def level_offset(self):
        """Shift from the S^z convention to the ``M * omega0`` level convention."""
        return 0.5 * self.n_atoms * self.omega0


class SparseOperator:
    """Real sparse matrix in canonical coordinate form (sorted by row, col; no duplicates)."""

    def __init__(self, dim, rows, cols, values):
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        values = np.asarray(values, dtype=float).ravel()
        if not (rows.shape == cols.shape == values.shape):
            raise DomainError("rows, cols and values must have equal length")
        if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= dim or cols.max() >= dim):
            raise DomainError(f"entry index outside [0, {dim})")
        order = np.lexsort((cols, rows))
        rows, cols, values = rows[order], cols[order], values[order]
        if rows.size > 1:
            same = (rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])
            if same.any():
                i = int(np.argmax(same))
                raise DomainError(f"duplicate entry at ({rows[i]}, {cols[i]})")
        for arr in (rows, cols, values):
            arr.setflags(write=False)
        self.dim = int(dim)
        self.rows, self.cols, self.values = rows, cols, values

    @classmethod
    def from_entries(cls, dim, entries):
        entries = list(entries)
        if not entries:
            return cls(dim, [], [], [])
        r, c, v = zip(*entries)
        return cls(dim, r, c, v)

    @property
    def nnz(self):
        return int(self.values.size)

    def entries(self):
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.values.tolist()))

    def transpose(self):
        return SparseOperator(self.dim, self.cols, self.rows, self.values)

    def is_symmetric(self):
        """Exact entry-level comparison with the transpose."""
        t = self.transpose()
        return (
            np.array_equal(self.rows, t.rows)
            and np.array_equal(self.cols, t.cols)
            and np.array_equal(self.values, t.values)
        )

    def diagonal(self):
        d = np.zeros(self.dim)
        on = self.rows == self.cols
        d[self.rows[on]] = self.values[on]
        return d

    def to_dense(self):
        m = np.zeros((self.dim, self.dim))
        m[self.rows, self.cols] = self.values
        return m

    def __add__(self, other):
        if not isinstance(other, SparseOperator) or other.dim != self.dim:
            return NotImplemented
        m = {}
        for r, c, v in self.entries() + other.entries():
            m[(r, c)] = m.get((r, c), 0.0) + v
        return SparseOperator.from_entries(self.dim, ((r, c, v) for (r, c), v in m.items()))

    def to_json(self):
        return json.dumps({"dim": self.dim, "entries": [list(e) for e in self.entries()]})

    def __repr__(self):
        return f"SparseOperator(dim={self.dim}, nnz={self.nnz})"


def matvec(op, v):
    """Sparse product ``op @ v``; ``v`` may be a vector or a (dim, k) block of columns."""
    v = np.asarray(v)
    if v.ndim not in (1, 2) or v.shape[0] != op.dim:
        raise DomainError(f"operator of dim {op.dim} cannot act on array of shape {v.shape}")
    dtype = np.result_type(v.dtype, float)
    out = np.zeros(v.shape, dtype=dtype)
    contrib = op.values.reshape((-1,) + (1,) * (v.ndim - 1)) * v[op.cols]
    np.add.at(out, op.rows, contrib)
    return out


def _check_level(cfg, n_excitations):
    dim = basis.subspace_dimension(cfg.n_atoms, n_excitations)
    check_dim(dim)
    return dim


def _hop_entries(cfg, n_excitations):
    n = cfg.n_atoms
    entries = []
    for col, pattern in enumerate(basis.enumerate_patterns(n, n_excitations)):
        for target in basis.hops(pattern, n):
            entries.append((basis.rank(target, n), col, cfg.omega))
    return entries


def build_subspace_V(cfg, n_excitations):
    """Dipole-dipole operator restricted to W^M, in lexicographic pattern order."""
    dim = _check_level(cfg, n_excitations)
    return SparseOperator.from_entries(dim, _hop_entries(cfg, n_excitations))


def build_subspace_H(cfg, n_excitations):
    """Full Hamiltonian block on W^M, S^z convention for the diagonal."""
    dim = _check_level(cfg, n_excitations)
    bare = cfg.omega0 * (n_excitations - 0.5 * cfg.n_atoms)
    entries = _hop_entries(cfg, n_excitations)
    if bare != 0.0:
        entries += [(i, i, bare) for i in range(dim)]
    return SparseOperator.from_entries(dim, entries)


@lru_cache(maxsize=128)
def cached_subspace_V(cfg, n_excitations):
    return build_subspace_V(cfg, n_excitations)


@lru_cache(maxsize=128)
def cached_subspace_H(cfg, n_excitations):
    return build_subspace_H(cfg, n_excitations)


def _check_full(n_atoms):
    if n_atoms > FULL_SPACE_MAX_ATOMS:
        raise ResourceError(f"full space of N={n_atoms} atoms exceeds cap N<={FULL_SPACE_MAX_ATOMS}")


def popcounts(n_atoms):
    masks = np.arange(2**n_atoms, dtype=np.int64)
    counts = np.zeros_like(masks)
    for i in range(n_atoms):
        counts += (masks >> i) & 1
    return counts


def build_full_H0(cfg):
    """omega0 * sum_i S_i^z on the bitmask basis (bit i set = atom i+1 excited)."""
    _check_full(cfg.n_atoms)
    dim = 2**cfg.n_atoms
    diag = cfg.omega0 * (popcounts(cfg.n_atoms) - 0.5 * cfg.n_atoms)
    idx = np.flatnonzero(diag)
    return SparseOperator(dim, idx, idx, diag[idx])


def build_full_V(cfg, couplings=None):
    """sum over bonds of omega * (S_i^+ S_j^- + S_j^+ S_i^-) on the bitmask basis.

    ``couplings`` maps 1-based atom pairs ``(i, j)`` to coupling strengths and
    defaults to the open nearest-neighbor chain with strength ``cfg.omega``.
    """
    n = cfg.n_atoms
    _check_full(n)
    if couplings is None:
        couplings = {(i, i + 1): cfg.omega for i in range(1, n)}
    masks = np.arange(2**n, dtype=np.int64)
    rows, cols, vals = [], [], []
    for (i, j), strength in sorted(couplings.items()):
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise DomainError(f"invalid bond ({i}, {j}) for N={n}")
        bi = (masks >> (i - 1)) & 1
        bj = (masks >> (j - 1)) & 1
        src = masks[bi != bj]
        flip = (1 << (i - 1)) | (1 << (j - 1))
        rows.append(src ^ flip)
        cols.append(src)
        vals.append(np.full(src.size, float(strength)))
    if not rows:
        return SparseOperator(2**n, [], [], [])
    return _summed(2**n, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))


def _summed(dim, rows, cols, vals):
    key = rows * dim + cols
    uniq, inv = np.unique(key, return_inverse=True)
    total = np.zeros(uniq.size)
    np.add.at(total, inv, vals)
    return SparseOperator(dim, uniq // dim, uniq % dim, total)


def build_full_H(cfg, couplings=None):
    """H = H0 + V on all 2^N states; N is capped at 14."""
    h0 = build_full_H0(cfg)
    v = build_full_V(cfg, couplings)
    return _summed(
        h0.dim,
        np.concatenate([h0.rows, v.rows]),
        np.concatenate([h0.cols, v.cols]),
        np.concatenate([h0.values, v.values]),
    )


def restrict(op, masks):
    """Dense sub-block of a full-space operator on the given bitmask states, in that order."""
    masks = np.asarray(masks, dtype=np.int64)
    position = np.full(op.dim, -1, dtype=np.int64)
    position[masks] = np.arange(masks.size)
    r, c = position[op.rows], position[op.cols]
    keep = (r >= 0) & (c >= 0)
    block = np.zeros((masks.size, masks.size))
    block[r[keep], c[keep]] = op.values[keep]
    return block


def level_masks(n_atoms, n_excitations):
    """Bitmasks of W^M listed in lexicographic pattern order."""
    return np.array(
        [basis.pattern_to_mask(p) for p in basis.enumerate_patterns(n_atoms, n_excitations)],
        dtype=np.int64,
    )
