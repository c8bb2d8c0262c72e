"""
Exports for plotting: latents, attention maps, attention by distance
and globality.
"""

import csv
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from ggt_vae.model import AttentionRecord
from ggt_vae.utils.logging import get_logger

from .attention_distance import AttentionByDistance, layer_average
from .globality import GlobalityReport

logger = get_logger(__name__)

PathLike = Union[str, Path]

LATENTS_FILE = "latents.csv"
ATTENTION_FILE = "attention_by_spd.csv"
GLOBALITY_FILE = "globality.csv"
ATTENTION_MAPS_FILE = "attention_maps.npz"
AVERAGE_HEAD = "avg"


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _write_rows(path: PathLike, header: List[str], rows: List[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def export_latents(
    mu: np.ndarray,
    path: PathLike,
    labels: Optional[np.ndarray] = None,
) -> Path:
    """
    Write ``node_id,label,z_1..z_d`` (empty label field when unknown).

    Args:
        mu: Latent means, ``N x d_z``
        path: Output CSV
        labels: Optional per-node class ids

    Returns:
        Path: The written file
    """
    mu = np.asarray(mu, dtype=np.float64)
    header = ["node_id", "label"] + [f"z_{j + 1}" for j in range(mu.shape[1])]
    rows = []
    for i, row in enumerate(mu):
        label = "" if labels is None else str(int(labels[i]))
        rows.append([i, label] + [_fmt(x) for x in row])
    _write_rows(path, header, rows)
    return Path(path)


def attention_map_key(layer: int, head: int) -> str:
    return f"layer{layer}_head{head}"


def export_attention_maps(attn: AttentionRecord, path: PathLike) -> Path:
    """
    Save every captured ``N x N`` attention matrix in one ``.npz``.

    Arrays are keyed ``layer{l}_head{h}`` with 0-based indices and keep
    full float64 precision.

    Args:
        attn: Attention captured during an eval-mode forward pass
        path: Output file; numpy appends ``.npz`` when missing

    Returns:
        Path: The written file
    """
    arrays = {
        attention_map_key(layer, head): np.asarray(matrix, dtype=np.float64)
        for layer in range(attn.num_layers)
        for head, matrix in enumerate(attn[layer])
    }
    path = Path(path)
    if path.suffix != ".npz":
        path = path.with_name(path.name + ".npz")
    np.savez_compressed(path, **arrays)
    logger.info(f"Wrote {len(arrays)} attention maps to {path}")
    return path


def export_analysis(
    abd: AttentionByDistance,
    report: GlobalityReport,
    out_dir: PathLike,
) -> Tuple[Path, Path]:
    """
    Write ``attention_by_spd.csv`` and ``globality.csv``.

    Rows are ordered by layer; within a layer the heads come in index
    order followed by the head-average row (head ``avg``), and attention
    rows ascend by distance.

    Returns:
        Tuple[Path, Path]: Attention and globality file paths
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    averages = layer_average(abd)

    attention_rows = []
    globality_rows = []
    for layer in range(abd.num_layers):
        for head in range(abd.num_heads):
            for i, d in enumerate(abd.distances):
                attention_rows.append(
                    [
                        layer,
                        head,
                        int(d),
                        _fmt(abd.means[layer, head, i]),
                        int(abd.counts[i]),
                    ]
                )
            globality_rows.append(
                [
                    layer,
                    head,
                    _fmt(report.values[layer, head]),
                    _fmt(report.normalized[layer, head]),
                ]
            )
        for i, d in enumerate(abd.distances):
            attention_rows.append(
                [
                    layer,
                    AVERAGE_HEAD,
                    int(d),
                    _fmt(averages[layer, i]),
                    int(abd.counts[i]),
                ]
            )
        globality_rows.append(
            [
                layer,
                AVERAGE_HEAD,
                _fmt(report.layer_values[layer]),
                _fmt(report.layer_normalized[layer]),
            ]
        )

    attention_path = out_dir / ATTENTION_FILE
    globality_path = out_dir / GLOBALITY_FILE
    _write_rows(
        attention_path,
        ["layer", "head", "spd", "mean_attention", "pair_count"],
        attention_rows,
    )
    _write_rows(
        globality_path,
        ["layer", "head", "globality", "normalized_globality"],
        globality_rows,
    )
    logger.info(
        f"Wrote {len(attention_rows)} attention rows and "
        f"{len(globality_rows)} globality rows to {out_dir}"
    )
    return attention_path, globality_path
