"""
Graph-transformer encoder.

Every node attends to every other node (no adjacency mask); topology
enters only through the Laplacian positional encoding added in
:func:`embed`. Each block is post-LayerNorm::

    t   = LayerNorm(N + MHA(N))
    out = LayerNorm(t + FFN(t)),   FFN(x) = ReLU(x W1 + b1) W2 + b2
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ggt_vae.exceptions import DimensionError
from ggt_vae.numerics import (
    Tensor,
    add,
    concat_cols,
    exp,
    layer_norm,
    matmul,
    mul,
    relu,
    scale,
    softmax_rows,
    transpose,
)

from .params import ModelParams

ROW_SUM_TOL = 1e-6


@dataclass
class EncoderInputs:
    """Node features and positional encodings as constant tensors."""

    features: Tensor
    pe: Tensor

    @classmethod
    def from_arrays(
        cls, features: np.ndarray, pe: np.ndarray
    ) -> "EncoderInputs":
        features = np.asarray(features, dtype=np.float64)
        pe = np.asarray(pe, dtype=np.float64)
        if features.shape[0] != pe.shape[0]:
            raise DimensionError(
                f"{features.shape[0]} feature rows but {pe.shape[0]} PE rows"
            )
        return cls(Tensor(features), Tensor(pe))

    @property
    def n(self) -> int:
        return self.features.rows


@dataclass
class AttentionRecord:
    """Attention matrices indexed ``[layer][head]``, each ``N x N``."""

    weights: List[List[np.ndarray]] = field(default_factory=list)

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    @property
    def num_heads(self) -> int:
        return len(self.weights[0]) if self.weights else 0

    def __getitem__(self, layer: int) -> List[np.ndarray]:
        return self.weights[layer]

    def stacked(self) -> np.ndarray:
        """All matrices as one array of shape ``(L, H, N, N)``."""
        return np.array(self.weights, dtype=np.float64)

    def max_row_sum_error(self) -> float:
        if not self.weights:
            return 0.0
        return float(np.abs(self.stacked().sum(axis=-1) - 1.0).max())


@dataclass
class ForwardOutput:
    """Result of :func:`encode`.

    Attributes:
        mu (Tensor): Posterior means, ``N x d_z``
        logvar (Tensor): Posterior log-variances, ``N x d_z``
        z (Tensor): Latent sample (``mu`` itself in evaluation mode)
        attention (Optional[AttentionRecord]): Captured attention
    """

    mu: Tensor
    logvar: Tensor
    z: Tensor
    attention: Optional[AttentionRecord] = None


def embed(inputs: EncoderInputs, params: ModelParams) -> Tensor:
    """``H0 = X W_x + P W_p``."""
    w_x, w_p = params["embed.W_x"], params["embed.W_p"]
    if inputs.features.cols != w_x.rows:
        raise DimensionError(
            f"Features have {inputs.features.cols} columns, "
            f"model expects {w_x.rows}"
        )
    if inputs.pe.cols != w_p.rows:
        raise DimensionError(
            f"Positional encoding has {inputs.pe.cols} columns, "
            f"model expects {w_p.rows}"
        )
    return add(matmul(inputs.features, w_x), matmul(inputs.pe, w_p))


def multi_head_attention(
    x: Tensor, params: ModelParams, layer: int
) -> Tuple[Tensor, List[np.ndarray]]:
    """
    Full scaled dot-product attention over all nodes.

    Args:
        x: Layer input, ``N x d_hid``
        params: Model parameters
        layer: Layer index

    Returns:
        Tuple[Tensor, List[np.ndarray]]: ``concat(heads) W_O`` and the
        per-head attention matrices (row-stochastic)
    """
    config = params.config
    if x.cols != config.hidden:
        raise DimensionError(
            f"Attention input has {x.cols} columns, expected {config.hidden}"
        )
    inv_sqrt_dk = 1.0 / np.sqrt(config.head_dim)
    prefix = f"layers.{layer}"
    outputs: List[Tensor] = []
    weights: List[np.ndarray] = []
    for head in range(config.heads):
        head_prefix = f"{prefix}.heads.{head}"
        q = matmul(x, params[f"{head_prefix}.W_Q"])
        k = matmul(x, params[f"{head_prefix}.W_K"])
        v = matmul(x, params[f"{head_prefix}.W_V"])
        attn = softmax_rows(scale(matmul(q, transpose(k)), inv_sqrt_dk))
        weights.append(attn.data)
        outputs.append(matmul(attn, v))
    heads = outputs[0] if len(outputs) == 1 else concat_cols(outputs)
    return matmul(heads, params[f"{prefix}.W_O"]), weights


def feed_forward(x: Tensor, params: ModelParams, layer: int) -> Tensor:
    prefix = f"layers.{layer}.ffn"
    hidden = add(matmul(x, params[f"{prefix}.W1"]), params[f"{prefix}.b1"])
    inner = relu(hidden)
    return add(matmul(inner, params[f"{prefix}.W2"]), params[f"{prefix}.b2"])


def transformer_layer(
    x: Tensor, params: ModelParams, layer: int
) -> Tuple[Tensor, List[np.ndarray]]:
    """One post-LayerNorm block; returns the output and its attention."""
    prefix = f"layers.{layer}"
    attended, weights = multi_head_attention(x, params, layer)
    t = layer_norm(
        add(x, attended),
        params[f"{prefix}.ln1.gamma"],
        params[f"{prefix}.ln1.beta"],
    )
    out = layer_norm(
        add(t, feed_forward(t, params, layer)),
        params[f"{prefix}.ln2.gamma"],
        params[f"{prefix}.ln2.beta"],
    )
    return out, weights


def reparameterize(
    mu: Tensor,
    logvar: Tensor,
    rng: Optional[np.random.Generator] = None,
) -> Tensor:
    """
    Draw ``z = mu + eps * exp(0.5 * logvar)`` with ``eps ~ N(0, I)``.

    Without a generator (evaluation mode) ``mu`` is returned unchanged.
    """
    if mu.shape != logvar.shape:
        raise DimensionError(
            f"mu {mu.shape} and logvar {logvar.shape} differ"
        )
    if rng is None:
        return mu
    eps = Tensor(rng.standard_normal(mu.shape))
    return add(mu, mul(eps, exp(scale(logvar, 0.5))))


def encode(
    inputs: EncoderInputs,
    params: ModelParams,
    capture_attention: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> ForwardOutput:
    """
    Run the encoder and the variational heads.

    Args:
        inputs: Features and positional encodings
        params: Model parameters
        capture_attention: Record every layer's attention matrices
        rng: Sampling stream; ``None`` means evaluation mode (``z = mu``)

    Returns:
        ForwardOutput: ``mu``, ``logvar``, ``z`` and optional attention
    """
    h = embed(inputs, params)
    record = AttentionRecord() if capture_attention else None
    for layer in range(params.config.layers):
        h, weights = transformer_layer(h, params, layer)
        if record is not None:
            record.weights.append(weights)

    mu = add(matmul(h, params["head.W_mu"]), params["head.b_mu"])
    logvar = add(matmul(h, params["head.W_logvar"]), params["head.b_logvar"])
    z = reparameterize(mu, logvar, rng)
    return ForwardOutput(mu=mu, logvar=logvar, z=z, attention=record)

