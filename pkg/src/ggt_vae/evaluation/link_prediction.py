"""Scoring stored held-out edges with a trained encoder."""

from typing import Sequence, Tuple

import numpy as np

from ggt_vae.exceptions import InsufficientDataError, SplitOverlapError
from ggt_vae.graph.models import Edge, EdgeSplit, canonical_edge
from ggt_vae.model import EncoderInputs, ModelParams, decode_pairs, encode
from ggt_vae.numerics import Tensor, no_grad

from .metrics import ScoredEdges, average_precision, roc_auc

PARTITIONS = ("val", "test")


def check_disjoint(split: EdgeSplit) -> None:
    """
    Raises:
        SplitOverlapError: A pair appears in both held-out partitions
    """
    val = {canonical_edge(u, v) for u, v in split.val_pos + split.val_neg}
    test = {canonical_edge(u, v) for u, v in split.test_pos + split.test_neg}
    shared = val & test
    if shared:
        raise SplitOverlapError(
            f"{len(shared)} pairs appear in both val and test, "
            f"e.g. {sorted(shared)[0]}"
        )


def score_edges(
    z: Tensor, positive: Sequence[Edge], negative: Sequence[Edge]
) -> ScoredEdges:
    """Decoder probabilities for positives then negatives."""
    with no_grad():
        pos = decode_pairs(z, positive).data if positive else np.empty(0)
        neg = decode_pairs(z, negative).data if negative else np.empty(0)
    return ScoredEdges.from_groups(pos, neg)


def evaluate_latents(
    z: Tensor, split: EdgeSplit, which: str
) -> Tuple[float, float]:
    """ROC-AUC and AP of one partition given fixed latents."""
    if which not in PARTITIONS:
        raise ValueError(
            f"Unknown partition '{which}'. Valid: {', '.join(PARTITIONS)}"
        )
    positive, negative = split.partition(which)
    if not positive or not negative:
        raise InsufficientDataError(f"The {which} partition is empty")
    check_disjoint(split)
    scored = score_edges(z, positive, negative)
    return roc_auc(scored), average_precision(scored)


def evaluate_split(
    params: ModelParams,
    inputs: EncoderInputs,
    split: EdgeSplit,
    which: str,
) -> Tuple[float, float]:
    """
    Evaluate a partition with the deterministic encoder (``z = mu``).

    Args:
        params: Trained parameters
        inputs: Features and positional encodings
        split: Edge split holding the stored pos/neg sets
        which: ``val`` or ``test``

    Returns:
        Tuple[float, float]: ``(roc_auc, average_precision)``

    Raises:
        InsufficientDataError: Empty partition
        SplitOverlapError: Validation and test share a pair
    """
    with no_grad():
        out = encode(inputs, params)
    return evaluate_latents(out.mu, split, which)
