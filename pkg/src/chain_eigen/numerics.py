"""Dense linear algebra for the oracle path.

Only numpy array arithmetic is used here; no ``numpy.linalg`` routine is
called, so the eigensolver stays independent of LAPACK.
"""

from typing import NamedTuple

import numpy as np

from .errors import DENSE_MAX_DIM, ConvergenceError, DomainError, ResourceError

PIVOT_FLOOR = 1e-300


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # column j pairs with eigenvalues[j]
    sweeps: int


def determinant_lu(a):
    """Determinant by LU factorization with partial pivoting.

    Accepts a single square matrix or a stack of shape ``(..., n, n)``; the
    result is a float or an array of the leading shape. A pivot whose
    magnitude falls below 1e-300 makes the determinant exactly 0.0.
    """
    a = np.array(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DomainError(f"determinant needs square matrices, got shape {a.shape}")
    n = a.shape[-1]
    lead = a.shape[:-2]
    a = a.reshape((-1, n, n))
    batch = np.arange(a.shape[0])
    det = np.ones(a.shape[0])
    for j in range(n):
        piv = j + np.argmax(np.abs(a[:, j:, j]), axis=1)
        swap = piv != j
        if swap.any():
            rows_j = a[batch, j, :].copy()
            a[batch, j, :] = a[batch, piv, :]
            a[batch, piv, :] = rows_j
            det[swap] = -det[swap]
        pivot = a[:, j, j]
        singular = np.abs(pivot) < PIVOT_FLOOR
        det *= np.where(singular, 0.0, pivot)
        if j + 1 < n:
            safe = np.where(singular, 1.0, pivot)
            factors = a[:, j + 1 :, j] / safe[:, None]
            a[:, j + 1 :, j:] -= factors[:, :, None] * a[:, None, j, j:]
    det = np.where(det == 0.0, 0.0, det)  # no negative zeros
    if not lead:
        return float(det[0])
    return det.reshape(lead)


def _round_robin(n):
    """Pairings of a cyclic tournament: n - 1 rounds covering every pair once (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        rounds.append((np.array(players[:half]), np.array(players[half:][::-1])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a):
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigh(a, tol=1e-12, max_sweeps=64, check_symmetric=1e-12):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every index pair once, in round-robin order; the pairs
    of one round are disjoint, so their rotations are applied together.
    Iteration stops once the off-diagonal Frobenius mass is below
    ``tol * ||A||_F``.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"jacobi_eigh needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > DENSE_MAX_DIM:
        raise ResourceError(f"dense dimension {n} exceeds cap {DENSE_MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    if np.max(np.abs(a - a.T), initial=0.0) > check_symmetric:
        raise DomainError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    scale = np.sqrt(np.sum(a * a))
    target = tol * scale

    size = n + (n % 2)
    rounds = _round_robin(size) if size > 1 else []
    if size != n:
        # drop pairs involving the padding index
        rounds = [(p[(p < n) & (q < n)], q[(p < n) & (q < n)]) for p, q in rounds]
    rounds = [(np.minimum(p, q), np.maximum(p, q)) for p, q in rounds]

    sweeps = 0
    while _off_norm(a) > target:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps", residual=_off_norm(a)
            )
        sweeps += 1
        for p, q in rounds:
            apq = a[p, q]
            active = np.abs(apq) > PIVOT_FLOOR
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            tau = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # A <- J^T A J with J[p,p] = J[q,q] = c, J[p,q] = s, J[q,p] = -s
            cols_p, cols_q = a[:, p], a[:, q]
            a[:, p] = c * cols_p - s * cols_q
            a[:, q] = s * cols_p + c * cols_q
            rows_p, rows_q = a[p, :], a[q, :]
            a[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            a[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p], v[:, q]
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return EigenDecomposition(eigenvalues[order], v[:, order], sweeps)


def gram_matrix(vectors):
    """Matrix of inner products ``G[i, j] = <v_i, v_j>`` (conjugate-linear in the first slot)."""
    rows = [np.asarray(x) for x in vectors]
    if not rows:
        return np.zeros((0, 0))
    length = rows[0].shape
    if any(r.shape != length or r.ndim != 1 for r in rows):
        raise DomainError("gram_matrix needs vectors of equal length")
    x = np.vstack(rows)
    return np.conj(x) @ x.T


def norm(v):
    v = np.asarray(v)
    return float(np.sqrt(np.sum(np.abs(v) ** 2)))


def max_abs(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a), initial=0.0))
