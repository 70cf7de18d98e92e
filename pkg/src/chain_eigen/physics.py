"""Observables and dynamics built on the analytic eigenbasis.

The transition dipole uses the small-sample model: every atom couples to
the field with the same phase, so the dipole operator is the collective
lowering sum ``sum_i S_i^-`` in units of the single-atom matrix element.
"""

from dataclasses import dataclass

import numpy as np

from . import analytic, basis
from .errors import DomainError, check_dim
from .operators import matvec


@dataclass(frozen=True)
class DipoleReport:
    mode_g1: int
    amplitude: float
    is_dark: bool

    def to_dict(self):
        return {"g1": self.mode_g1, "amplitude": self.amplitude, "is_dark": self.is_dark}


def dark_threshold(n_atoms):
    return 1e-10 * (n_atoms + 1)


def _as_state(state, n_atoms, n_excitations):
    state = np.asarray(state)
    dim = basis.subspace_dimension(n_atoms, n_excitations)
    if state.ndim != 1 or state.shape[0] != dim:
        raise DomainError(
            f"state of shape {state.shape} does not live in W^{n_excitations} of dimension {dim}"
        )
    if not np.all(np.isfinite(state)):
        raise DomainError("state has non-finite amplitudes")
    return state


def collective_lowering(state, n_atoms, n_excitations):
    """Apply ``sum_i S_i^-`` mapping W^M to W^(M-1)."""
    if n_excitations < 1:
        raise DomainError("collective lowering needs M >= 1; the ground state has no excitation")
    state = _as_state(state, n_atoms, n_excitations)
    check_dim(basis.subspace_dimension(n_atoms, n_excitations))
    out = np.zeros(basis.subspace_dimension(n_atoms, n_excitations - 1), dtype=state.dtype)
    for amp, pattern in zip(state, basis.enumerate_patterns(n_atoms, n_excitations)):
        if amp == 0:
            continue
        for drop in range(n_excitations):
            out[basis.rank(pattern[:drop] + pattern[drop + 1 :], n_atoms)] += amp
    return out


def dipole_to_ground(g1, n_atoms):
    """``<0| sum_i S_i^- |psi_g1>`` for the unnormalized single-excitation eigenstate.

    Equals ``sum_k sin(g1 k theta)``. Even ``g1`` gives zero: such states
    cannot decay to the ground state.
    """
    if not isinstance(g1, int) or not 1 <= g1 <= n_atoms:
        raise DomainError(f"g1={g1!r} outside [1, {n_atoms}]")
    amps = analytic.coefficient_array((g1,), np.arange(1, n_atoms + 1).reshape(-1, 1), n_atoms)
    amplitude = float(collective_lowering(amps, n_atoms, 1)[0])
    return DipoleReport(g1, amplitude, abs(amplitude) <= dark_threshold(n_atoms))


def dark_scan(n_atoms):
    return [dipole_to_ground(g, n_atoms) for g in range(1, n_atoms + 1)]


def _energies(cfg, n_excitations):
    return np.array([e for _, e in analytic.full_spectrum(cfg, n_excitations)])


def expand_in_eigenbasis(state, cfg, n_excitations):
    """Coefficients ``<psi_g|state>`` over the normalized modes of level M, lexicographic order."""
    state = _as_state(state, cfg.n_atoms, n_excitations)
    u = analytic.eigenbasis(cfg.n_atoms, n_excitations)
    return u.T @ state


def reconstruct(coefficients, cfg, n_excitations):
    return analytic.eigenbasis(cfg.n_atoms, n_excitations) @ np.asarray(coefficients)


def evolve(state, t, cfg, n_excitations):
    """Exact evolution ``exp(-i H t)`` of a state in W^M by phases on its eigen-expansion.

    Energies use the ``M * omega0`` convention; the constant offset from S^z
    only adds a global phase. ``t == 0`` returns the input unchanged.
    """
    state = _as_state(state, cfg.n_atoms, n_excitations)
    if not np.isfinite(t):
        raise DomainError(f"time must be finite, got {t!r}")
    if t == 0:
        return state.astype(complex, copy=True)
    coeffs = expand_in_eigenbasis(state, cfg, n_excitations)
    phases = np.exp(-1j * _energies(cfg, n_excitations) * t)
    return reconstruct(phases * coeffs, cfg, n_excitations)


def split_by_level(amplitudes, n_atoms):
    """Group a ``{pattern: amplitude}`` mapping into dense W^M vectors keyed by M."""
    levels = {}
    for pattern, amp in amplitudes.items():
        pattern = basis.validate_pattern(pattern, n_atoms)
        m = len(pattern)
        if m not in levels:
            levels[m] = np.zeros(basis.subspace_dimension(n_atoms, m), dtype=complex)
        levels[m][basis.rank(pattern, n_atoms)] += amp
    return levels


def evolve_mixed(amplitudes, t, cfg):
    """Evolve a superposition spanning several levels; each W^M block evolves on its own.

    Returns ``{pattern: amplitude}`` over every pattern of the levels present,
    ordered by M and then lexicographically.
    """
    out = {}
    for m, vec in sorted(split_by_level(amplitudes, cfg.n_atoms).items()):
        evolved = evolve(vec, t, cfg, m)
        for pattern, amp in zip(basis.enumerate_patterns(cfg.n_atoms, m), evolved):
            out[pattern] = complex(amp)
    return out


def expectation(op, state):
    """``<state|op|state>`` for a sparse real symmetric operator."""
    state = np.asarray(state)
    return complex(np.vdot(state, matvec(op, state))).real
