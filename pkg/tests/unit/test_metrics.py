"""
Unit tests for ROC-AUC and average precision.
"""

import numpy as np
import pytest

from ggt_vae.exceptions import DimensionError, UndefinedMetricError
from ggt_vae.evaluation import (
    ScoredEdges,
    average_precision,
    average_ranks,
    roc_auc,
)


def _pairwise_auc(pos, neg):
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return (wins + 0.5 * ties) / (pos.size * neg.size)


def test_average_ranks_ties():
    """Test tied values share their mean rank."""
    np.testing.assert_array_equal(
        average_ranks(np.array([10.0, 20.0, 20.0, 30.0])), [1, 2.5, 2.5, 4]
    )
    np.testing.assert_array_equal(
        average_ranks(np.array([3.0, 1.0, 2.0])), [3, 1, 2]
    )


def test_perfect_ranking():
    """Test positives above every negative give AUC = AP = 1."""
    s = ScoredEdges.from_groups([0.9, 0.8], [0.1, 0.2, 0.3])

    assert roc_auc(s) == 1.0
    assert average_precision(s) == 1.0


def test_inverted_ranking():
    """Test positives below every negative give AUC = 0."""
    s = ScoredEdges.from_groups([0.1], [0.5, 0.6])

    assert roc_auc(s) == 0.0
    assert abs(average_precision(s) - 1.0 / 3.0) < 1e-12


def test_all_tied_scores():
    """Test constant scores give AUC = 0.5."""
    s = ScoredEdges.from_groups([0.5, 0.5], [0.5, 0.5])

    assert roc_auc(s) == 0.5


def test_average_precision_hand_example():
    """Test AP = (1/1 + 2/3) / 2 for the ranking +, -, +."""
    s = ScoredEdges(np.array([0.9, 0.8, 0.7]), np.array([1, 0, 1]))

    assert abs(average_precision(s) - (1.0 + 2.0 / 3.0) / 2.0) < 1e-12


def _direct_average_precision(scores, labels):
    """Precision at every positive, ties broken by original position."""
    index = np.arange(scores.size)
    higher = scores[None, :] > scores[:, None]
    tied = scores[None, :] == scores[:, None]
    ahead = higher | (tied & (index[None, :] < index[:, None]))
    rank = ahead.sum(axis=1) + 1
    hits = (ahead & (labels[None, :] == 1)).sum(axis=1) + 1
    positive = labels == 1
    return float((hits[positive] / rank[positive]).sum() / positive.sum())


def _random_instance(rng):
    n = int(rng.integers(2, 301))
    labels = (rng.random(n) < rng.uniform(0.1, 0.9)).astype(int)
    labels[0], labels[1] = 1, 0
    scores = rng.random(n)
    if rng.random() < 0.5:
        scores = np.round(scores, int(rng.integers(1, 3)))
    return scores, labels


def test_auc_matches_pairwise_oracle():
    """Test rank-based AUC against the O(n^2) pair count, with ties."""
    rng = np.random.default_rng(0)
    for _ in range(1000):
        scores, labels = _random_instance(rng)
        pos, neg = scores[labels == 1], scores[labels == 0]

        auc = roc_auc(ScoredEdges(scores, labels))

        assert abs(auc - _pairwise_auc(pos, neg)) < 1e-12


def test_average_precision_matches_oracle():
    """Test AP against a direct precision-at-each-hit sum."""
    rng = np.random.default_rng(1)
    for _ in range(1000):
        scores, labels = _random_instance(rng)

        ap = average_precision(ScoredEdges(scores, labels))

        assert abs(ap - _direct_average_precision(scores, labels)) < 1e-12


def test_single_class_is_undefined():
    """Test metrics refuse inputs with only one class."""
    s = ScoredEdges.from_groups([0.3, 0.4], [])

    with pytest.raises(UndefinedMetricError):
        roc_auc(s)
    with pytest.raises(UndefinedMetricError):
        average_precision(s)


def test_scored_edges_validation():
    """Test label values and lengths are checked."""
    with pytest.raises(DimensionError):
        ScoredEdges(np.zeros(3), np.zeros(2))
    with pytest.raises(ValueError):
        ScoredEdges(np.zeros(2), np.array([0, 2]))


def test_group_counts():
    """Test positive and negative counts."""
    s = ScoredEdges.from_groups([0.1, 0.2, 0.3], [0.4])

    assert (s.num_positive, s.num_negative) == (3, 1)


@pytest.mark.parametrize(
    "transform",
    [np.exp, lambda x: 3.0 * x - 7.0, np.arctan],
    ids=["exp", "affine", "arctan"],
)
def test_monotone_transform_invariance(transform):
    """Test both metrics depend only on the score order."""
    rng = np.random.default_rng(2)
    pos, neg = rng.standard_normal(25) + 0.5, rng.standard_normal(30)
    base = ScoredEdges.from_groups(pos, neg)
    moved = ScoredEdges.from_groups(transform(pos), transform(neg))

    assert abs(roc_auc(moved) - roc_auc(base)) < 1e-12
    assert abs(average_precision(moved) - average_precision(base)) < 1e-12


def test_negated_scores_complement_auc():
    """Test AUC(s) + AUC(-s) = 1 without ties."""
    rng = np.random.default_rng(3)
    pos, neg = rng.random(20), rng.random(15)

    total = roc_auc(ScoredEdges.from_groups(pos, neg)) + roc_auc(
        ScoredEdges.from_groups(-pos, -neg)
    )

    assert abs(total - 1.0) < 1e-12
