"""Symmetric normalized graph Laplacian."""

import numpy as np

from .models import TrainAdjacency


def normalized_laplacian(adj: TrainAdjacency) -> np.ndarray:
    """
    ``L = I - D^{-1/2} A D^{-1/2}``.

    Isolated nodes keep ``L_ii = 1`` and zero off-diagonals (0/0 is
    taken as 0).
    """
    degree = adj.matrix.sum(axis=1)
    inv_sqrt = np.zeros_like(degree)
    nonzero = degree > 0
    inv_sqrt[nonzero] = 1.0 / np.sqrt(degree[nonzero])
    lap = np.eye(adj.n) - inv_sqrt[:, None] * adj.matrix * inv_sqrt[None, :]
    # Exact symmetry for the eigensolver.
    return 0.5 * (lap + lap.T)
