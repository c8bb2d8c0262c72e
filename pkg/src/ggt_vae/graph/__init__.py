"""Graph data, file formats, edge splits and BFS distances."""

from .io import (
    load_graph,
    load_graph_dir,
    load_split,
    save_graph,
    save_split,
)
from .laplacian import normalized_laplacian
from .models import Edge, EdgeSplit, Graph, TrainAdjacency, canonical_edge
from .paths import (
    UNREACHABLE,
    all_pairs_spd,
    bfs_spd,
    connected_components,
    diameter,
    largest_component,
)
from .split import sample_negatives, split_edges
from .synthetic import stochastic_block_model

__all__ = [
    "Edge",
    "EdgeSplit",
    "Graph",
    "TrainAdjacency",
    "UNREACHABLE",
    "all_pairs_spd",
    "bfs_spd",
    "canonical_edge",
    "connected_components",
    "diameter",
    "largest_component",
    "load_graph",
    "load_graph_dir",
    "load_split",
    "normalized_laplacian",
    "sample_negatives",
    "save_graph",
    "save_split",
    "split_edges",
    "stochastic_block_model",
]
