"""Combinatorial basis of the M-excitation subspaces.

A basis ket |k_1, ..., k_M> is an *excitation pattern*: a strictly increasing
tuple of 1-based atom indices. Patterns of one subspace are ordered
lexicographically and ranked with the combinatorial number system, so
``rank`` and ``unrank`` run in O(M) with exact integer arithmetic.
"""

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .errors import DomainError, check_dim

HOP_BELOW_FIRST = "a"  # index would become 0
HOP_PAST_LAST = "b"  # index would become N + 1
HOP_COLLISION = "c"  # two excitations on the same atom


def _check_address(n_atoms, n_excitations):
    if not isinstance(n_atoms, int) or not isinstance(n_excitations, int):
        raise DomainError("atom and excitation counts must be integers")
    if n_atoms < 1:
        raise DomainError(f"chain needs at least one atom, got N={n_atoms}")
    if not 0 <= n_excitations <= n_atoms:
        raise DomainError(f"excitation number M={n_excitations} outside [0, {n_atoms}]")


def subspace_dimension(n_atoms, n_excitations):
    """Dimension of W^M, i.e. ``binomial(N, M)``."""
    _check_address(n_atoms, n_excitations)
    return comb(n_atoms, n_excitations)


def validate_pattern(pattern, n_atoms, n_excitations=None):
    """Return ``pattern`` as a tuple, raising DomainError if it is not a valid ket label."""
    pattern = tuple(pattern)
    if n_excitations is not None and len(pattern) != n_excitations:
        raise DomainError(f"pattern {pattern} has length {len(pattern)}, expected {n_excitations}")
    _check_address(n_atoms, len(pattern))
    for a, b in zip(pattern, pattern[1:]):
        if not a < b:
            raise DomainError(f"pattern {pattern} is not strictly increasing")
    if pattern and not (1 <= pattern[0] and pattern[-1] <= n_atoms):
        raise DomainError(f"pattern {pattern} has indices outside [1, {n_atoms}]")
    if any(not isinstance(k, int) for k in pattern):
        raise DomainError(f"pattern {pattern} must contain integers")
    return pattern


def rank(pattern, n_atoms):
    """0-based lexicographic position of ``pattern`` among the M-subsets of {1..N}."""
    pattern = validate_pattern(pattern, n_atoms)
    m = len(pattern)
    # lex rank = C(N, M) - 1 - sum_i C(N - k_i, M - i), i counted from 0
    total = sum(comb(n_atoms - k, m - i) for i, k in enumerate(pattern))
    return comb(n_atoms, m) - 1 - total


def unrank(index, n_atoms, n_excitations):
    """Inverse of :func:`rank`."""
    dim = subspace_dimension(n_atoms, n_excitations)
    if not isinstance(index, int) or not 0 <= index < dim:
        raise DomainError(f"rank {index} outside [0, {dim})")
    remaining = dim - 1 - index
    pattern = []
    upper = n_atoms - 1
    for i in range(n_excitations):
        r = n_excitations - i
        # largest c <= upper with C(c, r) <= remaining; c = N - k_i
        c = upper
        while comb(c, r) > remaining:
            c -= 1
        remaining -= comb(c, r)
        pattern.append(n_atoms - c)
        upper = c - 1
    return tuple(pattern)


def enumerate_patterns(n_atoms, n_excitations):
    """All patterns of W^M in lexicographic order."""
    check_dim(subspace_dimension(n_atoms, n_excitations))
    return list(combinations(range(1, n_atoms + 1), n_excitations))


@lru_cache(maxsize=128)
def pattern_array(n_atoms, n_excitations):
    """Read-only (dim, M) integer array of :func:`enumerate_patterns`."""
    pats = enumerate_patterns(n_atoms, n_excitations)
    arr = np.array(pats, dtype=np.int64).reshape(len(pats), n_excitations)
    arr.setflags(write=False)
    return arr


def classify_hop(pattern, slot, direction, n_atoms):
    """Return which invalidity condition a hop hits, or None when the hop is allowed.

    ``slot`` is 1-based; ``direction`` is +1 or -1.
    """
    pattern = tuple(pattern)
    if not 1 <= slot <= len(pattern):
        raise DomainError(f"slot {slot} outside [1, {len(pattern)}]")
    if direction not in (1, -1):
        raise DomainError(f"direction must be +1 or -1, got {direction}")
    target = pattern[slot - 1] + direction
    if target == 0:
        return HOP_BELOW_FIRST
    if target == n_atoms + 1:
        return HOP_PAST_LAST
    if target in pattern:
        return HOP_COLLISION
    return None


def apply_hop(pattern, slot, direction, n_atoms):
    """Move excitation ``slot`` by one site; None when the move leaves the subspace basis."""
    if classify_hop(pattern, slot, direction, n_atoms) is not None:
        return None
    moved = list(pattern)
    moved[slot - 1] += direction
    return tuple(sorted(moved))


def hops(pattern, n_atoms):
    """All patterns reachable from ``pattern`` by one nearest-neighbor hop."""
    out = []
    for slot in range(1, len(pattern) + 1):
        for direction in (-1, 1):
            target = apply_hop(pattern, slot, direction, n_atoms)
            if target is not None:
                out.append(target)
    return out


def pattern_to_mask(pattern):
    """Bitmask with bit ``k - 1`` set for every excited atom ``k``."""
    mask = 0
    for k in pattern:
        mask |= 1 << (k - 1)
    return mask


def mask_to_pattern(mask):
    pattern = []
    k = 1
    while mask:
        if mask & 1:
            pattern.append(k)
        mask >>= 1
        k += 1
    return tuple(pattern)
