"""Inner-product edge decoder with the self-loop mask."""

from typing import Sequence

import numpy as np

from ggt_vae.exceptions import DimensionError, SelfLoopError
from ggt_vae.graph.models import Edge
from ggt_vae.numerics import (
    Tensor,
    add,
    gather_rows,
    mask_diagonal,
    matmul,
    row_dot,
    scale,
    sigmoid,
    transpose,
)


def pair_index(pairs: Sequence[Edge], n: int) -> np.ndarray:
    """
    Validate node pairs and return them as an ``(m, 2)`` index array.

    Raises:
        DimensionError: Index outside ``0..n-1``
        SelfLoopError: A pair with ``u == v``
    """
    index = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
    if index.size and (index.min() < 0 or index.max() >= n):
        raise DimensionError(f"Pair index out of range for {n} nodes")
    loops = index[:, 0] == index[:, 1]
    if loops.any():
        u = int(index[np.argmax(loops), 0])
        raise SelfLoopError(f"Self-loop pair ({u}, {u}) cannot be scored")
    return index


def decode_logits(z: Tensor, pairs: Sequence[Edge]) -> Tensor:
    """Inner products ``z_u . z_v`` as an ``(m, 1)`` column."""
    index = pair_index(pairs, z.rows)
    return row_dot(gather_rows(z, index[:, 0]), gather_rows(z, index[:, 1]))


def decode_pairs(z: Tensor, pairs: Sequence[Edge]) -> Tensor:
    """Edge probabilities ``sigmoid(z_u . z_v)``, shape ``(m, 1)``."""
    return sigmoid(decode_logits(z, pairs))


def decode_full(z: Tensor) -> Tensor:
    """Dense reconstruction ``sigmoid(Z Z^T)`` with a zero diagonal.

    The logits are symmetrized before the sigmoid so the result equals
    its transpose exactly.
    """
    logits = matmul(z, transpose(z))
    symmetric = scale(add(logits, transpose(logits)), 0.5)
    return mask_diagonal(sigmoid(symmetric))
