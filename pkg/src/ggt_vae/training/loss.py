"""VAE objective: reconstruction BCE plus beta-weighted Gaussian KL."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ggt_vae.exceptions import DimensionError
from ggt_vae.graph.models import Edge
from ggt_vae.model import ForwardOutput, decode_pairs
from ggt_vae.numerics import (
    Tensor,
    add,
    add_scalar,
    bce,
    exp,
    mul,
    scale,
    sub,
    sum_all,
)


@dataclass
class LossTerms:
    """Scalar (1 x 1) loss tensors."""

    total: Tensor
    recon: Tensor
    kl: Tensor


def kl_divergence(mu: Tensor, logvar: Tensor) -> Tensor:
    """``(1/N) sum_i -0.5 sum_j (1 + logvar - mu^2 - exp(logvar))``."""
    inner = sub(sub(add_scalar(logvar, 1.0), mul(mu, mu)), exp(logvar))
    return scale(sum_all(inner), -0.5 / mu.rows)


def reconstruction_loss(
    z: Tensor, positive: Sequence[Edge], negative: Sequence[Edge]
) -> Tensor:
    """Mean BCE over positives (target 1) and negatives (target 0)."""
    probs = decode_pairs(z, list(positive) + list(negative))
    target = np.concatenate(
        [np.ones((len(positive), 1)), np.zeros((len(negative), 1))]
    )
    return bce(probs, target)


def compute_loss(
    out: ForwardOutput,
    train_pos: Sequence[Edge],
    train_neg: Sequence[Edge],
    beta: float,
) -> LossTerms:
    """
    Assemble ``total = recon + beta * kl``.

    Args:
        out: Encoder output; ``out.z`` is decoded
        train_pos: Training edges
        train_neg: Sampled non-edges, as many as ``train_pos``
        beta: KL weight

    Returns:
        LossTerms: Differentiable total, recon and kl

    Raises:
        DimensionError: Unbalanced or empty edge sets
    """
    if len(train_pos) != len(train_neg):
        raise DimensionError(
            f"Need balanced samples, got {len(train_pos)} positives and "
            f"{len(train_neg)} negatives"
        )
    if not train_pos:
        raise DimensionError("No training edges to reconstruct")
    recon = reconstruction_loss(out.z, train_pos, train_neg)
    kl = kl_divergence(out.mu, out.logvar)
    total = add(recon, scale(kl, beta))
    return LossTerms(total=total, recon=recon, kl=kl)
