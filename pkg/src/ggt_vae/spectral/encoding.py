"""
Laplacian positional encodings.

Columns are eigenvectors of the normalized training Laplacian with the
``k`` smallest non-trivial eigenvalues, unit norm, sign-canonicalized so
the first entry with magnitude above 1e-9 is positive.
"""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ggt_vae.exceptions import DimensionError
from ggt_vae.graph.laplacian import normalized_laplacian
from ggt_vae.graph.models import TrainAdjacency
from ggt_vae.utils.cache import generate_pe_key, get_cache_manager
from ggt_vae.utils.logging import get_logger

from .eigen import eigh_symmetric

logger = get_logger(__name__)

ZERO_MODE_TOL = 1e-8
SIGN_TOL = 1e-9
SOLVERS = ("jacobi", "numpy")


@dataclass
class PositionalEncoding:
    """Per-node Laplacian coordinates.

    Attributes:
        matrix (np.ndarray): Shape ``(N, k)``
        eigenvalues (np.ndarray): Eigenvalue of each column (0 for padding)
        num_padded (int): Trailing all-zero columns
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    num_padded: int = 0

    @property
    def k(self) -> int:
        return int(self.matrix.shape[1])


def canonicalize_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so their first clearly nonzero entry is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        nonzero = np.flatnonzero(np.abs(out[:, j]) > SIGN_TOL)
        if nonzero.size and out[nonzero[0], j] < 0:
            out[:, j] = -out[:, j]
    return out


def _decompose(lap: np.ndarray, solver: str) -> Tuple[np.ndarray, np.ndarray]:
    if solver == "jacobi":
        return eigh_symmetric(lap)
    if solver == "numpy":
        values, vectors = np.linalg.eigh(lap)
        order = np.argsort(values, kind="stable")
        return values[order], vectors[:, order]
    raise ValueError(
        f"Unknown eigensolver '{solver}'. Valid: {', '.join(SOLVERS)}"
    )


def compute_laplacian_pe(
    adj: TrainAdjacency, k: int, solver: str = "jacobi"
) -> PositionalEncoding:
    """Uncached :func:`laplacian_pe`."""
    n = adj.n
    if k >= n:
        raise DimensionError(f"PE width k={k} must be smaller than N={n}")
    if k < 1:
        raise DimensionError(f"PE width k={k} must be at least 1")

    lap = normalized_laplacian(adj)
    values, vectors = _decompose(lap, solver)
    keep = values >= ZERO_MODE_TOL
    values, vectors = values[keep], vectors[:, keep]
    values, vectors = values[:k], vectors[:, :k]
    vectors = vectors / np.linalg.norm(vectors, axis=0, keepdims=True)
    vectors = canonicalize_signs(vectors)

    padded = k - vectors.shape[1]
    if padded:
        logger.warning(
            f"Only {vectors.shape[1]} non-trivial eigenvectors; "
            f"zero-padding {padded} positional-encoding columns"
        )
        vectors = np.hstack([vectors, np.zeros((n, padded))])
        values = np.concatenate([values, np.zeros(padded)])
    return PositionalEncoding(vectors, values, padded)


def laplacian_pe(
    adj: TrainAdjacency,
    k: int,
    solver: str = "jacobi",
    cache_dir: Optional[Union[str, Path]] = None,
) -> PositionalEncoding:
    """
    Laplacian positional encoding of the training adjacency.

    Zero modes (eigenvalue below 1e-8, one per connected component) are
    dropped; the next ``k`` eigenvectors in ascending order are kept.
    Fewer than ``k`` remaining columns are zero-padded with a warning.

    Args:
        adj: Training adjacency
        k: Encoding width, ``k < N``
        solver: ``jacobi`` (default) or ``numpy``
        cache_dir: Optional directory for the CSV cache

    Returns:
        PositionalEncoding: Deterministic encoding (bitwise-stable for a
        given adjacency)

    Raises:
        DimensionError: ``k >= N``
    """
    key = generate_pe_key(adj.adjacency_hash(), k, solver)
    return get_cache_manager().get_or_compute(
        key, lambda: _load_or_compute(adj, k, solver, cache_dir)
    )


def _load_or_compute(
    adj: TrainAdjacency,
    k: int,
    solver: str,
    cache_dir: Optional[Union[str, Path]],
) -> PositionalEncoding:
    if cache_dir is None:
        return compute_laplacian_pe(adj, k, solver)

    disk_path = Path(cache_dir) / (
        f"pe_{adj.adjacency_hash()[:16]}_k{k}_{solver}.csv"
    )
    if disk_path.exists():
        return read_pe_csv(disk_path, adj)
    pe = compute_laplacian_pe(adj, k, solver)
    disk_path.parent.mkdir(parents=True, exist_ok=True)
    write_pe_csv(pe, disk_path)
    return pe


def write_pe_csv(pe: PositionalEncoding, path: Union[str, Path]) -> None:
    """Write ``node_id,p_1..p_k`` rows with 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["node_id"] + [f"p_{j + 1}" for j in range(pe.k)])
        for i, row in enumerate(pe.matrix):
            writer.writerow([i] + [f"{x:.17g}" for x in row])


def read_pe_csv(
    path: Union[str, Path], adj: TrainAdjacency
) -> PositionalEncoding:
    """Read a cached encoding; eigenvalues come back as Rayleigh quotients."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    matrix = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    if matrix.shape[0] != adj.n:
        raise DimensionError(
            f"Cached PE {path} has {matrix.shape[0]} rows, graph has {adj.n}"
        )
    lap = normalized_laplacian(adj)
    eigenvalues = np.einsum("ij,ik,kj->j", matrix, lap, matrix)
    num_padded = int(np.sum(~matrix.any(axis=0)))
    return PositionalEncoding(matrix, eigenvalues, num_padded)
