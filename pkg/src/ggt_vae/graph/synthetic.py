"""
Stochastic block model graphs.

Synthetic testbed with dense intra-block and sparse inter-block
connectivity; features are noisy one-hot block indicators.
"""

from typing import Sequence

import numpy as np

from ggt_vae.utils.logging import get_logger

from .models import Graph

logger = get_logger(__name__)


def stochastic_block_model(
    sizes: Sequence[int],
    p_in: float,
    p_out: float,
    feature_dim: int = 8,
    feature_noise: float = 0.5,
    seed: int = 0,
) -> Graph:
    """
    Draw an undirected SBM graph.

    Args:
        sizes: Nodes per block
        p_in: Edge probability inside a block
        p_out: Edge probability across blocks
        feature_dim: Feature width (at least the number of blocks)
        feature_noise: Std of Gaussian noise added to the indicators
        seed: Random seed

    Returns:
        Graph: Nodes ordered block by block, labels = block id
    """
    if not (0 <= p_out <= 1 and 0 <= p_in <= 1):
        raise ValueError("Edge probabilities must lie in [0, 1]")
    if feature_dim < len(sizes):
        raise ValueError(
            f"feature_dim {feature_dim} < number of blocks {len(sizes)}"
        )
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = int(labels.size)

    same = labels[:, None] == labels[None, :]
    prob = np.where(same, p_in, p_out)
    draws = rng.random((n, n))
    upper = np.triu((draws < prob).astype(bool), k=1)
    rows, cols = np.nonzero(upper)
    edges = list(zip(rows.tolist(), cols.tolist()))

    features = feature_noise * rng.standard_normal((n, feature_dim))
    features[np.arange(n), labels] += 1.0

    graph = Graph(n=n, features=features, edges=edges, labels=labels)
    logger.debug(
        f"SBM sizes={list(sizes)} p_in={p_in} p_out={p_out}: "
        f"{graph.num_edges} edges"
    )
    return graph
