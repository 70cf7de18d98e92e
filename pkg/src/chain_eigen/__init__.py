"""Exact multi-excitation eigenstates of an open chain of dipole-coupled two-level atoms."""

from .analytic import Eigenstate, coefficient, eigenstate, energy, full_spectrum, mode_tuples
from .errors import ChainEigenError, ConvergenceError, DomainError, ResourceError
from .operators import ChainConfig, SparseOperator, build_full_H, build_subspace_V, matvec
from .verify import VerificationReport

__all__ = [
    "ChainConfig",
    "ChainEigenError",
    "ConvergenceError",
    "DomainError",
    "Eigenstate",
    "ResourceError",
    "SparseOperator",
    "VerificationReport",
    "build_full_H",
    "build_subspace_V",
    "coefficient",
    "eigenstate",
    "energy",
    "full_spectrum",
    "matvec",
    "mode_tuples",
]

__version__ = "0.1.0"
