"""Link-prediction metrics and split evaluation."""

from .link_prediction import (
    check_disjoint,
    evaluate_latents,
    evaluate_split,
    score_edges,
)
from .metrics import ScoredEdges, average_precision, average_ranks, roc_auc

__all__ = [
    "ScoredEdges",
    "average_precision",
    "average_ranks",
    "check_disjoint",
    "evaluate_latents",
    "evaluate_split",
    "roc_auc",
    "score_edges",
]
