"""
Data models for graphs and edge splits.

This module defines the dataset object (:class:`Graph`), the held-out
edge protocol (:class:`EdgeSplit`) and the training-time adjacency
(:class:`TrainAdjacency`).
"""

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Set, Tuple

import numpy as np

from ggt_vae.exceptions import DimensionError
from ggt_vae.utils.cache import hash_array

Edge = Tuple[int, int]


def canonical_edge(u: int, v: int) -> Edge:
    """Order an undirected pair as ``(min, max)``."""
    return (u, v) if u < v else (v, u)


@dataclass
class Graph:
    """Undirected, unweighted graph with node features.

    Attributes:
        n (int): Node count
        features (np.ndarray): Node-feature matrix, shape ``(n, d_node)``
        edges (List[Edge]): Sorted undirected pairs ``(u, v)`` with u < v
        labels (Optional[np.ndarray]): Per-node class ids, export only
    """

    n: int
    features: np.ndarray
    edges: List[Edge] = field(default_factory=list)
    labels: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2 or self.features.shape[0] != self.n:
            raise DimensionError(
                f"Feature matrix must have {self.n} rows, "
                f"got shape {self.features.shape}"
            )
        unique: Set[Edge] = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"Self-loop on node {u} is not allowed")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(
                    f"Edge ({u}, {v}) out of range for {self.n} nodes"
                )
            unique.add(canonical_edge(u, v))
        self.edges = sorted(unique)
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (self.n,):
                raise DimensionError(
                    f"Expected {self.n} labels, got {self.labels.shape}"
                )

    @property
    def d_node(self) -> int:
        return int(self.features.shape[1])

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_set(self) -> Set[Edge]:
        return set(self.edges)

    def graph_hash(self) -> str:
        """SHA-256 over node count, feature bytes and sorted edges."""
        digest = hashlib.sha256()
        digest.update(np.int64(self.n).tobytes())
        digest.update(np.ascontiguousarray(self.features).tobytes())
        digest.update(np.asarray(self.edges, dtype=np.int64).tobytes())
        return digest.hexdigest()


@dataclass
class EdgeSplit:
    """Held-out link-prediction protocol.

    Attributes:
        train_pos (List[Edge]): Training edges
        val_pos (List[Edge]): Validation positives
        val_neg (List[Edge]): Validation negatives, ``|val_neg| = |val_pos|``
        test_pos (List[Edge]): Test positives
        test_neg (List[Edge]): Test negatives, ``|test_neg| = |test_pos|``
        seed (int): Seed the split was drawn with
        graph_hash (str): Hash of the graph the split belongs to
        held_out (List[Edge]): Held-out positives that are not scored
            (non-empty only when evaluation subsampling is on)
    """

    train_pos: List[Edge]
    val_pos: List[Edge]
    val_neg: List[Edge]
    test_pos: List[Edge]
    test_neg: List[Edge]
    seed: int
    graph_hash: str = ""
    held_out: List[Edge] = field(default_factory=list)

    def partition(self, which: str) -> Tuple[List[Edge], List[Edge]]:
        """Return ``(positives, negatives)`` for ``val`` or ``test``."""
        if which == "val":
            return self.val_pos, self.val_neg
        if which == "test":
            return self.test_pos, self.test_neg
        raise ValueError(f"Unknown partition '{which}' (use val or test)")

    def negatives(self) -> Set[Edge]:
        return set(self.val_neg) | set(self.test_neg)


@dataclass
class TrainAdjacency:
    """Dense symmetric 0/1 adjacency built from training edges only.

    Attributes:
        matrix (np.ndarray): Shape ``(n, n)``, float64, zero diagonal
    """

    matrix: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "TrainAdjacency":
        matrix = np.zeros((n, n), dtype=np.float64)
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if pairs.size:
            matrix[pairs[:, 0], pairs[:, 1]] = 1.0
            matrix[pairs[:, 1], pairs[:, 0]] = 1.0
        np.fill_diagonal(matrix, 0.0)
        return cls(matrix)

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    def neighbors(self) -> List[np.ndarray]:
        """Adjacency lists, one sorted index array per node."""
        return [np.flatnonzero(row) for row in self.matrix]

    def num_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.matrix, k=1)))

    def adjacency_hash(self) -> str:
        return hash_array(self.matrix)
