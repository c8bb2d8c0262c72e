"""
Attention aggregated by shortest-path distance.

For every layer and head, the mean attention weight over all ordered
node pairs ``(u, v)`` whose training-graph distance is ``d``. Pairs in
different components have no distance and are left out.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ggt_vae.exceptions import DimensionError
from ggt_vae.graph import TrainAdjacency, all_pairs_spd, diameter
from ggt_vae.model import AttentionRecord


@dataclass
class AttentionByDistance:
    """Mean attention per realized distance.

    Attributes:
        distances (np.ndarray): Realized finite SPDs, ascending ints
        means (np.ndarray): Shape ``(L, H, D)``; ``means[l, h, i]`` is the
            mean attention at ``distances[i]``
        counts (np.ndarray): Ordered pairs per distance, shape ``(D,)``
        diameter (int): Longest finite SPD of the training graph
        exclude_self (bool): Whether ``d = 0`` was left out
    """

    distances: np.ndarray
    means: np.ndarray
    counts: np.ndarray
    diameter: int
    exclude_self: bool = False

    @property
    def num_layers(self) -> int:
        return int(self.means.shape[0])

    @property
    def num_heads(self) -> int:
        return int(self.means.shape[1])


def attention_by_distance(
    attn: AttentionRecord,
    adj: TrainAdjacency,
    exclude_self: bool = False,
    spd: Optional[np.ndarray] = None,
) -> AttentionByDistance:
    """
    Bucket captured attention by SPD on the training adjacency.

    Args:
        attn: Captured attention, ``[layer][head]`` of ``N x N``
        adj: Training adjacency
        exclude_self: Drop the ``d = 0`` bucket
        spd: Precomputed :func:`all_pairs_spd` result

    Returns:
        AttentionByDistance: Means and pair counts per realized distance

    Raises:
        DimensionError: Attention matrices do not match the graph size
    """
    weights = attn.stacked()
    if weights.ndim != 4 or weights.shape[-2:] != (adj.n, adj.n):
        raise DimensionError(
            f"Attention of shape {weights.shape} does not match "
            f"a graph with {adj.n} nodes"
        )
    distances_matrix = all_pairs_spd(adj) if spd is None else spd
    finite = np.isfinite(distances_matrix)
    realized = np.unique(distances_matrix[finite]).astype(np.int64)
    if exclude_self:
        realized = realized[realized > 0]

    means = np.zeros(weights.shape[:2] + (realized.size,))
    counts = np.zeros(realized.size, dtype=np.int64)
    for i, d in enumerate(realized):
        mask = distances_matrix == d
        counts[i] = int(mask.sum())
        means[:, :, i] = weights[:, :, mask].mean(axis=-1)

    return AttentionByDistance(
        distances=realized,
        means=means,
        counts=counts,
        diameter=diameter(adj, distances_matrix),
        exclude_self=exclude_self,
    )


def layer_average(abd: AttentionByDistance) -> np.ndarray:
    """Head-averaged ``mean attention`` per layer, shape ``(L, D)``."""
    return abd.means.mean(axis=1)
