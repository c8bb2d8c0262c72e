"""
Graph and split file formats.

``nodes.tsv``: ``<node_id>\\t<f_1>\\t...\\t<f_d>`` per node, ids dense
``0..N-1``. A header line ``#labels`` means every row carries a trailing
``\\t<label>`` column. Other lines starting with ``#`` are comments.

``edges.tsv``: ``<u>\\t<v>`` per edge; reversed duplicates collapse to one
undirected edge, self-loops are rejected.

Splits are JSON documents with ``seed``, ``graph_hash`` and the five edge
lists.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ggt_vae.exceptions import GraphParseError
from ggt_vae.utils.logging import get_logger

from .models import Edge, EdgeSplit, Graph, canonical_edge

logger = get_logger(__name__)

PathLike = Union[str, Path]

LABELS_HEADER = "#labels"
NODES_FILE = "nodes.tsv"
EDGES_FILE = "edges.tsv"

SPLIT_KEYS = ("train_pos", "val_pos", "val_neg", "test_pos", "test_neg")


def _read_lines(path: PathLike) -> List[str]:
    with open(path, "r", encoding="utf-8") as f:
        return f.read().splitlines()


def _parse_nodes(
    path: PathLike,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    has_labels = False
    rows: Dict[int, List[float]] = {}
    labels: Dict[int, int] = {}
    width: Optional[int] = None

    for line_no, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.lower() == LABELS_HEADER:
                has_labels = True
            continue

        fields = line.split("\t")
        if has_labels:
            if len(fields) < 3:
                raise GraphParseError(
                    str(path), line_no, "expected id, features and label"
                )
            fields, label_field = fields[:-1], fields[-1]
        elif len(fields) < 2:
            raise GraphParseError(
                str(path), line_no, "expected node id and features"
            )

        try:
            node = int(fields[0])
            values = [float(x) for x in fields[1:]]
            label = int(label_field) if has_labels else None
        except ValueError as e:
            raise GraphParseError(str(path), line_no, str(e)) from e

        if width is None:
            width = len(values)
        elif len(values) != width:
            raise GraphParseError(
                str(path),
                line_no,
                f"expected {width} features, found {len(values)}",
            )
        if not np.isfinite(values).all():
            raise GraphParseError(str(path), line_no, "non-finite feature")
        if node in rows:
            raise GraphParseError(
                str(path), line_no, f"duplicate node id {node}"
            )
        rows[node] = values
        if label is not None:
            labels[node] = label

    n = len(rows)
    if n == 0:
        raise GraphParseError(str(path), 0, "no nodes")
    missing = sorted(set(range(n)) - set(rows))
    if missing:
        raise GraphParseError(
            str(path), 0, f"node ids must be dense 0..{n - 1}; "
            f"missing {missing[:5]}"
        )

    features = np.array([rows[i] for i in range(n)], dtype=np.float64)
    label_array = (
        np.array([labels[i] for i in range(n)], dtype=np.int64)
        if has_labels
        else None
    )
    return features, label_array


def _parse_edges(path: PathLike, n: int) -> List[Edge]:
    edges = set()
    for line_no, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise GraphParseError(
                str(path), line_no, f"expected 2 fields, found {len(fields)}"
            )
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError as e:
            raise GraphParseError(str(path), line_no, str(e)) from e
        for node in (u, v):
            if not 0 <= node < n:
                raise GraphParseError(
                    str(path),
                    line_no,
                    f"node id {node} out of range 0..{n - 1}",
                )
        if u == v:
            raise GraphParseError(
                str(path), line_no, f"self-loop on node {u}"
            )
        edges.add(canonical_edge(u, v))
    return sorted(edges)


def load_graph(nodes_path: PathLike, edges_path: PathLike) -> Graph:
    """
    Load and validate a graph from its TSV files.

    Args:
        nodes_path: Path to ``nodes.tsv``
        edges_path: Path to ``edges.tsv``

    Returns:
        Graph: Validated graph with deduplicated edges

    Raises:
        GraphParseError: Malformed row, feature-length mismatch, node id
            out of range or self-loop (message names file and line)
    """
    features, labels = _parse_nodes(nodes_path)
    edges = _parse_edges(edges_path, features.shape[0])
    graph = Graph(n=features.shape[0], features=features, edges=edges,
                  labels=labels)
    logger.info(
        f"Loaded graph: {graph.n} nodes, {graph.num_edges} edges, "
        f"{graph.d_node} features"
    )
    return graph


def load_graph_dir(directory: PathLike) -> Graph:
    """Load ``nodes.tsv`` and ``edges.tsv`` from one directory."""
    directory = Path(directory)
    return load_graph(directory / NODES_FILE, directory / EDGES_FILE)


def _format_float(value: float) -> str:
    return f"{value:.17g}"


def save_graph(
    graph: Graph, nodes_path: PathLike, edges_path: PathLike
) -> None:
    """Write a graph in the TSV formats read by :func:`load_graph`."""
    with open(nodes_path, "w", encoding="utf-8", newline="\n") as f:
        if graph.labels is not None:
            f.write(LABELS_HEADER + "\n")
        for i in range(graph.n):
            fields = [str(i)] + [_format_float(x) for x in graph.features[i]]
            if graph.labels is not None:
                fields.append(str(int(graph.labels[i])))
            f.write("\t".join(fields) + "\n")
    with open(edges_path, "w", encoding="utf-8", newline="\n") as f:
        for u, v in graph.edges:
            f.write(f"{u}\t{v}\n")


def split_to_dict(split: EdgeSplit) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"seed": split.seed, "graph_hash": split.graph_hash}
    for key in SPLIT_KEYS:
        doc[key] = [[int(u), int(v)] for u, v in getattr(split, key)]
    if split.held_out:
        doc["held_out"] = [[int(u), int(v)] for u, v in split.held_out]
    return doc


def save_split(split: EdgeSplit, path: PathLike) -> None:
    """Serialize a split as JSON (stable key order, one line per list)."""
    text = json.dumps(split_to_dict(split), sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_split(path: PathLike) -> EdgeSplit:
    """
    Read a split written by :func:`save_split`.

    Raises:
        GraphParseError: Not a JSON object, missing keys or malformed
            edge lists
    """
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise GraphParseError(str(path), e.lineno, e.msg) from e

    if not isinstance(doc, dict):
        raise GraphParseError(
            str(path), 0, f"expected a JSON object, found {type(doc).__name__}"
        )

    lists: Dict[str, List[Edge]] = {}
    for key in SPLIT_KEYS + ("held_out",):
        if key not in doc:
            if key == "held_out":
                lists[key] = []
                continue
            raise GraphParseError(str(path), 0, f"missing key '{key}'")
        try:
            lists[key] = [
                canonical_edge(int(u), int(v)) for u, v in doc[key]
            ]
        except (TypeError, ValueError) as e:
            raise GraphParseError(
                str(path), 0, f"malformed edge list '{key}': {e}"
            ) from e
    if "seed" not in doc:
        raise GraphParseError(str(path), 0, "missing key 'seed'")

    return EdgeSplit(
        train_pos=lists["train_pos"],
        val_pos=lists["val_pos"],
        val_neg=lists["val_neg"],
        test_pos=lists["test_pos"],
        test_neg=lists["test_neg"],
        seed=int(doc["seed"]),
        graph_hash=str(doc.get("graph_hash", "")),
        held_out=lists["held_out"],
    )
