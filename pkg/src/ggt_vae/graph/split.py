"""
Edge splitting and negative sampling.

Positive edges are shuffled and partitioned into train / validation /
test; every held-out partition is paired with the same number of
sampled non-edges.
"""

import math
from typing import Iterable, List, Optional, Set

import numpy as np

from ggt_vae.exceptions import InfeasibleSamplingError, InsufficientDataError
from ggt_vae.utils.logging import get_logger

from .models import Edge, EdgeSplit, Graph, canonical_edge

logger = get_logger(__name__)

MIN_EDGES = 10
DEFAULT_VAL_FRAC = 0.05
DEFAULT_TEST_FRAC = 0.10

# Above this share of the available pool, enumerate candidates instead
# of rejection sampling.
_ENUMERATE_THRESHOLD = 0.25

# Distinct streams derived from a split seed.
_STREAM_SHUFFLE = 0
_STREAM_VAL_NEG = 1
_STREAM_TEST_NEG = 2


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream])


def _normalize(pairs: Iterable[Edge]) -> Set[Edge]:
    return {canonical_edge(int(u), int(v)) for u, v in pairs}


def sample_negatives(
    g: Graph,
    count: int,
    exclude: Optional[Iterable[Edge]] = None,
    seed: int = 0,
    rng: Optional[np.random.Generator] = None,
    edge_set: Optional[Set[Edge]] = None,
) -> List[Edge]:
    """
    Sample node pairs that are not edges, without replacement.

    Args:
        g: Graph whose edges are forbidden
        count: Number of pairs to draw
        exclude: Additional forbidden pairs (any orientation)
        seed: Seed used when ``rng`` is not given
        rng: Generator to draw from (overrides ``seed``)
        edge_set: Precomputed ``g.edge_set()`` for repeated calls

    Returns:
        List[Edge]: ``count`` distinct pairs ``(u, v)`` with u < v, in
        draw order

    Raises:
        InfeasibleSamplingError: Fewer than ``count`` candidate pairs
    """
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    edges = g.edge_set() if edge_set is None else edge_set
    forbidden_extra = {
        e for e in _normalize(exclude or ()) if e[0] != e[1]
    } - edges
    total_pairs = g.n * (g.n - 1) // 2
    available = total_pairs - len(edges) - len(forbidden_extra)
    if count > available:
        raise InfeasibleSamplingError(
            f"Requested {count} negative pairs, only {available} available"
        )
    if count == 0:
        return []
    generator = rng if rng is not None else np.random.default_rng(seed)

    if count > _ENUMERATE_THRESHOLD * available:
        rows, cols = np.triu_indices(g.n, k=1)
        candidates = [
            (int(u), int(v))
            for u, v in zip(rows, cols)
            if (u, v) not in edges and (u, v) not in forbidden_extra
        ]
        picks = generator.choice(len(candidates), size=count, replace=False)
        return [candidates[i] for i in picks]

    chosen: List[Edge] = []
    seen: Set[Edge] = set()
    while len(chosen) < count:
        batch = max(2 * (count - len(chosen)), 16)
        us = generator.integers(0, g.n, size=batch)
        vs = generator.integers(0, g.n, size=batch)
        for u, v in zip(us, vs):
            if u == v:
                continue
            pair = canonical_edge(int(u), int(v))
            if pair in edges or pair in forbidden_extra or pair in seen:
                continue
            seen.add(pair)
            chosen.append(pair)
            if len(chosen) == count:
                break
    return chosen


def split_edges(
    g: Graph,
    val_frac: float = DEFAULT_VAL_FRAC,
    test_frac: float = DEFAULT_TEST_FRAC,
    seed: int = 0,
    eval_subsample: float = 1.0,
) -> EdgeSplit:
    """
    Randomly partition edges into train / validation / test.

    Held-out counts are ``floor(frac * |E|)``; the remainder trains.
    Validation negatives avoid every true edge; test negatives also
    avoid the validation negatives.

    Args:
        g: Graph to split
        val_frac: Validation share of edges
        test_frac: Test share of edges
        seed: Split seed; the split is a pure function of its arguments
        eval_subsample: Fraction of held-out positives that are scored
            (the rest stay out of training but are not evaluated)

    Returns:
        EdgeSplit: The split, stamped with the graph hash

    Raises:
        InsufficientDataError: Fewer than 10 edges, or a held-out
            partition that rounds down to zero edges
        ValueError: Invalid fractions
    """
    if val_frac < 0 or test_frac < 0 or val_frac + test_frac >= 1:
        raise ValueError(
            f"Need val_frac + test_frac < 1, got {val_frac} + {test_frac}"
        )
    if not 0 < eval_subsample <= 1:
        raise ValueError(
            f"eval_subsample must be in (0, 1], got {eval_subsample}"
        )
    m = g.num_edges
    if m < MIN_EDGES:
        raise InsufficientDataError(
            f"Graph has {m} edges; at least {MIN_EDGES} are required"
        )

    n_val = int(math.floor(val_frac * m))
    n_test = int(math.floor(test_frac * m))
    if n_val == 0 or n_test == 0:
        raise InsufficientDataError(
            f"{m} edges leave an empty held-out partition "
            f"(val={n_val}, test={n_test})"
        )

    order = _rng(seed, _STREAM_SHUFFLE).permutation(m)
    edges = np.asarray(g.edges, dtype=np.int64)
    shuffled = [(int(u), int(v)) for u, v in edges[order]]
    val_pos = shuffled[:n_val]
    test_pos = shuffled[n_val:n_val + n_test]
    train_pos = sorted(shuffled[n_val + n_test:])

    held_out: List[Edge] = []
    if eval_subsample < 1.0:
        keep_val = max(1, int(math.floor(eval_subsample * n_val)))
        keep_test = max(1, int(math.floor(eval_subsample * n_test)))
        held_out = sorted(val_pos[keep_val:] + test_pos[keep_test:])
        val_pos = val_pos[:keep_val]
        test_pos = test_pos[:keep_test]

    edge_set = g.edge_set()
    val_neg = sample_negatives(
        g, len(val_pos), rng=_rng(seed, _STREAM_VAL_NEG), edge_set=edge_set
    )
    test_neg = sample_negatives(
        g,
        len(test_pos),
        exclude=val_neg,
        rng=_rng(seed, _STREAM_TEST_NEG),
        edge_set=edge_set,
    )

    split = EdgeSplit(
        train_pos=train_pos,
        val_pos=val_pos,
        val_neg=val_neg,
        test_pos=test_pos,
        test_neg=test_neg,
        seed=seed,
        graph_hash=g.graph_hash(),
        held_out=held_out,
    )
    logger.info(
        f"Split seed={seed}: train={len(train_pos)} val={len(val_pos)} "
        f"test={len(test_pos)}"
        + (f" unscored={len(held_out)}" if held_out else "")
    )
    return split
