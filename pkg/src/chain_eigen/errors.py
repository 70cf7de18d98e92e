"""Exception types and size caps shared across the package."""

import os

DEFAULT_MAX_DIM = 2**26
FULL_SPACE_MAX_ATOMS = 14
DENSE_MAX_DIM = 4096


class ChainEigenError(Exception):
    """Base class for all errors raised by chain_eigen."""

    kind = "error"


class DomainError(ChainEigenError, ValueError):
    """Input outside the domain of an operation."""

    kind = "domain_error"


class ResourceError(ChainEigenError):
    """A requested object would exceed a configured size cap."""

    kind = "resource_error"


class ConvergenceError(ChainEigenError):
    """An iterative routine failed to converge."""

    kind = "convergence_error"

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def max_dim():
    """Subspace dimension cap, overridable through ``CHAIN_EIGEN_MAX_DIM``."""
    raw = os.environ.get("CHAIN_EIGEN_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"CHAIN_EIGEN_MAX_DIM must be an integer, got {raw!r}") from None
    if value < 1:
        raise DomainError("CHAIN_EIGEN_MAX_DIM must be positive")
    return value


def check_dim(dim, what="subspace"):
    cap = max_dim()
    if dim > cap:
        raise ResourceError(f"{what} dimension {dim} exceeds cap {cap}")
