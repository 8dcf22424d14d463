"""Symmetric eigenvalues by cyclic Jacobi rotations and Hermitian operator norms."""

from __future__ import annotations

import numpy as np

from .exceptions import ContractError, DimensionError, VerificationError
from .quaternion import ATOL, as_quaternion_array, embed, is_hermitian

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def _round_robin(n):
    """Yield index arrays ``(p, q)`` of disjoint pairs; n - 1 rounds cover all pairs once."""
    players = list(range(n))
    if n % 2:
        players.append(-1)
    size = len(players)
    for _ in range(size - 1):
        p, q = [], []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a < 0 or b < 0:
                continue
            p.append(min(a, b))
            q.append(max(a, b))
        yield np.array(p), np.array(q)
        players = [players[0], players[-1]] + players[1:-1]


def _off_norm(A):
    off = A - np.diag(np.diag(A))
    return np.sqrt(np.sum(off * off))


def jacobi_eigvalsh(A, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix, ascending.

    Cyclic Jacobi with a round-robin ordering: each round applies ``n // 2``
    rotations on disjoint index pairs at once, which gives exactly the result
    of applying them one after another. Iteration stops once the off-diagonal
    Frobenius norm drops below ``tol * ||A||_F``.

    Raises
    ------
    VerificationError
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    A = np.array(A, dtype=float, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n == 0:
        return np.zeros(0)
    A = 0.5 * (A + A.T)
    scale = np.sqrt(np.sum(A * A))
    if scale == 0.0 or n == 1:
        return np.sort(np.diag(A).copy())
    threshold = tol * scale
    schedule = list(_round_robin(n))

    for _ in range(max_sweeps):
        if _off_norm(A) < threshold:
            return np.sort(np.diag(A).copy())
        for p, q in schedule:
            apq = A[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            with np.errstate(over="ignore"):
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            cols_p = A[:, p].copy()
            cols_q = A[:, q].copy()
            A[:, p] = c * cols_p - s * cols_q
            A[:, q] = s * cols_p + c * cols_q
            rows_p = A[p, :].copy()
            rows_q = A[q, :].copy()
            A[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            A[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            A[p, q] = 0.0
            A[q, p] = 0.0
    if _off_norm(A) < threshold:
        return np.sort(np.diag(A).copy())
    raise VerificationError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def op_norm_hermitian(Psi, atol: float = ATOL) -> float:
    """Operator norm ``||Psi||_{2->2}`` of a Hermitian quaternion matrix.

    Computed as the largest absolute eigenvalue of the symmetric real
    embedding. It dominates every Rayleigh value ``|<Psi x, x>| / ||x||^2``.
    """
    Psi = as_quaternion_array(Psi, 2)
    if not is_hermitian(Psi, atol):
        raise ContractError("op_norm_hermitian requires a square Hermitian matrix")
    eig = jacobi_eigvalsh(embed(Psi))
    return float(np.max(np.abs(eig))) if eig.size else 0.0
