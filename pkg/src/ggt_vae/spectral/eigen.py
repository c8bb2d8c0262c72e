"""
Symmetric eigendecomposition by cyclic Jacobi rotations.

Each sweep visits every off-diagonal pair once using a round-robin
(tournament) ordering: a round pairs every index with exactly one other,
so its ``floor(N/2)`` rotations touch disjoint rows/columns and are
applied together as one vectorized update.
"""

from functools import lru_cache
from typing import List, Tuple

import numpy as np

from ggt_vae.exceptions import (
    ConvergenceError,
    DimensionError,
    NotSymmetricError,
)
from ggt_vae.utils.logging import get_logger
from ggt_vae.utils.performance import measure_time

logger = get_logger(__name__)

SYMMETRY_TOL = 1e-9
OFF_DIAGONAL_TOL = 1e-10
MAX_SWEEPS = 100

Round = Tuple[np.ndarray, np.ndarray]


@lru_cache(maxsize=8)
def _tournament(n: int) -> Tuple[Round, ...]:
    """Round-robin schedule covering every pair ``p < q`` exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds: List[Round] = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append(
            (np.array(ps, dtype=np.int64), np.array(qs, dtype=np.int64))
        )
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _max_off_diagonal(a: np.ndarray) -> float:
    off = np.abs(a - np.diag(np.diag(a)))
    return float(off.max()) if off.size else 0.0


def _rotate(a: np.ndarray, v: np.ndarray, p: np.ndarray, q: np.ndarray):
    app = a[p, p]
    aqq = a[q, q]
    apq = a[p, q]
    active = apq != 0.0
    if not active.any():
        return
    p, q = p[active], q[active]
    app, aqq, apq = app[active], aqq[active], apq[active]

    theta = (aqq - app) / (2.0 * apq)
    big = np.abs(theta) > 1e150
    safe = np.where(big, 0.0, theta)
    t = np.where(
        big,
        0.5 / np.where(big, theta, 1.0),
        np.where(safe >= 0, 1.0, -1.0)
        / (np.abs(safe) + np.sqrt(safe * safe + 1.0)),
    )
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    # A <- P^T A P, V <- V P with P_pp = P_qq = c, P_pq = s, P_qp = -s.
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c[:, None] * row_p - s[:, None] * row_q
    a[q, :] = s[:, None] * row_p + c[:, None] * row_q

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = col_p * c - col_q * s
    a[:, q] = col_p * s + col_q * c
    a[p, q] = 0.0
    a[q, p] = 0.0

    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = vec_p * c - vec_q * s
    v[:, q] = vec_p * s + vec_q * c


@measure_time
def eigh_symmetric(
    m: np.ndarray,
    tol: float = OFF_DIAGONAL_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decompose a real symmetric matrix.

    Args:
        m: Square symmetric matrix
        tol: Convergence threshold on the largest off-diagonal entry
        max_sweeps: Sweep limit

    Returns:
        Tuple[np.ndarray, np.ndarray]: Eigenvalues ascending and the
        matching orthonormal eigenvectors as columns (stable order
        among equal eigenvalues)

    Raises:
        DimensionError: ``m`` is not square
        NotSymmetricError: ``max|M - M^T| >= 1e-9``
        ConvergenceError: Off-diagonals still above ``tol`` after
            ``max_sweeps`` sweeps
    """
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"Expected a square matrix, got {a.shape}")
    asym = float(np.abs(a - a.T).max()) if a.size else 0.0
    if asym >= SYMMETRY_TOL:
        raise NotSymmetricError(
            f"Matrix is not symmetric (max |M - M^T| = {asym:.3e})"
        )
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)

    rounds = _tournament(n)
    sweeps = 0
    while _max_off_diagonal(a) >= tol:
        if sweeps == max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal {_max_off_diagonal(a):.3e})"
            )
        for p, q in rounds:
            _rotate(a, v, p, q)
        sweeps += 1
    logger.debug(f"Jacobi converged on {n}x{n} after {sweeps} sweeps")

    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]
