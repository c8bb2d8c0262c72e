"""
Ranking metrics for link prediction.

ROC-AUC is the Mann-Whitney statistic over average ranks, so tied
scores earn half credit. Average precision walks the ranking in
descending score order; equal scores keep their original relative
order.
"""

from dataclasses import dataclass

import numpy as np

from ggt_vae.exceptions import DimensionError, UndefinedMetricError


@dataclass
class ScoredEdges:
    """Scores with 0/1 labels of equal length.

    Attributes:
        scores (np.ndarray): Real scores, higher means more likely an edge
        labels (np.ndarray): 1 for positives, 0 for negatives
    """

    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        self.scores = np.asarray(self.scores, dtype=np.float64).ravel()
        self.labels = np.asarray(self.labels).ravel().astype(np.int64)
        if self.scores.shape != self.labels.shape:
            raise DimensionError(
                f"{self.scores.size} scores but {self.labels.size} labels"
            )
        if not np.isin(self.labels, (0, 1)).all():
            raise ValueError("Labels must be 0 or 1")

    @classmethod
    def from_groups(
        cls, positive: np.ndarray, negative: np.ndarray
    ) -> "ScoredEdges":
        """Positives first, then negatives."""
        positive = np.asarray(positive, dtype=np.float64).ravel()
        negative = np.asarray(negative, dtype=np.float64).ravel()
        return cls(
            np.concatenate([positive, negative]),
            np.concatenate(
                [np.ones(positive.size), np.zeros(negative.size)]
            ),
        )

    @property
    def num_positive(self) -> int:
        return int(self.labels.sum())

    @property
    def num_negative(self) -> int:
        return int(self.labels.size - self.labels.sum())

    def require_both_classes(self) -> None:
        if self.num_positive == 0 or self.num_negative == 0:
            raise UndefinedMetricError(
                f"Metric undefined with {self.num_positive} positives "
                f"and {self.num_negative} negatives"
            )


def average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties replaced by their mean rank."""
    _, inverse, counts = np.unique(
        values, return_inverse=True, return_counts=True
    )
    upper = np.cumsum(counts).astype(np.float64)
    lower = upper - counts + 1.0
    return ((lower + upper) / 2.0)[inverse.ravel()]


def roc_auc(s: ScoredEdges) -> float:
    """
    Area under the ROC curve.

    Raises:
        UndefinedMetricError: Only one class present
    """
    s.require_both_classes()
    ranks = average_ranks(s.scores)
    n_pos, n_neg = s.num_positive, s.num_negative
    rank_sum = float(ranks[s.labels == 1].sum())
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def average_precision(s: ScoredEdges) -> float:
    """
    Step-sum average precision, ``sum_k (R(k) - R(k-1)) P(k)``.

    Raises:
        UndefinedMetricError: Only one class present
    """
    s.require_both_classes()
    order = np.argsort(-s.scores, kind="stable")
    ranked = s.labels[order]
    hits = np.cumsum(ranked)
    precision = hits / np.arange(1, ranked.size + 1)
    return float(precision[ranked == 1].sum() / s.num_positive)
