"""
Breadth-first search distances on the training adjacency.

Unreachable pairs carry ``UNREACHABLE`` (``inf``).
"""

from collections import deque
from typing import List, Optional

import numpy as np

from ggt_vae.exceptions import InsufficientDataError

from .models import TrainAdjacency

UNREACHABLE = np.inf


def bfs_spd(
    adj: TrainAdjacency,
    source: int,
    neighbors: Optional[List[np.ndarray]] = None,
) -> np.ndarray:
    """
    Unweighted shortest-path distances from ``source``.

    Args:
        adj: Training adjacency
        source: Start node
        neighbors: Precomputed ``adj.neighbors()`` for repeated calls

    Returns:
        np.ndarray: Distance per node, ``inf`` where unreachable
    """
    if not 0 <= source < adj.n:
        raise IndexError(f"Source {source} out of range 0..{adj.n - 1}")
    lists = adj.neighbors() if neighbors is None else neighbors
    dist = np.full(adj.n, UNREACHABLE)
    dist[source] = 0.0
    queue = deque([source])
    while queue:
        node = queue.popleft()
        step = dist[node] + 1.0
        for nxt in lists[node]:
            if dist[nxt] == UNREACHABLE:
                dist[nxt] = step
                queue.append(nxt)
    return dist


def all_pairs_spd(adj: TrainAdjacency) -> np.ndarray:
    """``N x N`` distance matrix, one BFS per node."""
    lists = adj.neighbors()
    return np.vstack([bfs_spd(adj, s, lists) for s in range(adj.n)])


def connected_components(adj: TrainAdjacency) -> List[np.ndarray]:
    """Node index arrays of each component, largest first."""
    lists = adj.neighbors()
    seen = np.zeros(adj.n, dtype=bool)
    components = []
    for start in range(adj.n):
        if seen[start]:
            continue
        reach = np.isfinite(bfs_spd(adj, start, lists))
        seen |= reach
        components.append(np.flatnonzero(reach))
    components.sort(key=lambda c: (-len(c), int(c[0])))
    return components


def largest_component(adj: TrainAdjacency) -> np.ndarray:
    return connected_components(adj)[0]


def diameter(
    adj: TrainAdjacency, spd: Optional[np.ndarray] = None
) -> int:
    """
    Longest shortest path inside the largest connected component.

    Ties between equally large components go to the one holding the
    smallest node id.

    Args:
        adj: Training adjacency
        spd: Precomputed :func:`all_pairs_spd` result

    Returns:
        int: Maximum SPD between nodes of the largest component

    Raises:
        InsufficientDataError: The graph has no edges
    """
    if adj.num_edges() == 0:
        raise InsufficientDataError("Diameter is undefined without edges")
    distances = all_pairs_spd(adj) if spd is None else spd
    nodes = largest_component(adj)
    return int(distances[np.ix_(nodes, nodes)].max())
