"""
Unit tests for the graph-transformer encoder.
"""

import numpy as np
import pytest

from ggt_vae.exceptions import DimensionError
from ggt_vae.model import (
    EncoderInputs,
    embed,
    encode,
    init_params,
    multi_head_attention,
    reparameterize,
    transformer_layer,
)
from ggt_vae.numerics import Tensor, no_grad
from ggt_vae.utils.config import ModelConfig


@pytest.fixture
def inputs():
    """
    Random features (4 wide) and positional encodings (3 wide), 8 nodes.

    Returns:
        EncoderInputs: Constant encoder inputs
    """
    rng = np.random.default_rng(2)
    return EncoderInputs.from_arrays(
        rng.standard_normal((8, 4)), rng.standard_normal((8, 3))
    )


def test_output_shapes(inputs, tiny_params):
    """Test mu, logvar and z are N x d_z."""
    out = encode(inputs, tiny_params)

    assert out.mu.shape == (8, 4)
    assert out.logvar.shape == (8, 4)
    assert out.z.shape == (8, 4)
    assert out.attention is None


def test_evaluation_mode_uses_mean(inputs, tiny_params):
    """Test z is mu when no sampling stream is given."""
    out = encode(inputs, tiny_params)

    assert out.z is out.mu


def test_sampling_is_reproducible(inputs, tiny_params):
    """Test the same stream gives the same sample, differing from mu."""
    a = encode(inputs, tiny_params, rng=np.random.default_rng(9))
    b = encode(inputs, tiny_params, rng=np.random.default_rng(9))

    assert np.array_equal(a.z.data, b.z.data)
    assert not np.allclose(a.z.data, a.mu.data)


def test_attention_is_row_stochastic(inputs, tiny_params):
    """Test captured attention has one N x N matrix per layer and head."""
    with no_grad():
        out = encode(inputs, tiny_params, capture_attention=True)
    record = out.attention

    assert record.num_layers == 2
    assert record.num_heads == 2
    assert record.stacked().shape == (2, 2, 8, 8)
    assert record.max_row_sum_error() < 1e-6


def test_attention_is_unmasked(inputs, tiny_params):
    """Test every node attends to every other node."""
    with no_grad():
        out = encode(inputs, tiny_params, capture_attention=True)

    assert np.all(out.attention.stacked() > 0.0)


def test_permutation_equivariance(inputs, tiny_params):
    """Test permuting nodes permutes the latent means."""
    perm = np.random.default_rng(4).permutation(8)
    permuted = EncoderInputs.from_arrays(
        inputs.features.data[perm], inputs.pe.data[perm]
    )

    with no_grad():
        mu = encode(inputs, tiny_params).mu.data
        mu_perm = encode(permuted, tiny_params).mu.data

    np.testing.assert_allclose(mu_perm, mu[perm], atol=1e-12)


def test_embed_checks_widths(tiny_params):
    """Test feature and PE widths must match the parameters."""
    wrong_features = EncoderInputs.from_arrays(
        np.zeros((8, 5)), np.zeros((8, 3))
    )
    wrong_pe = EncoderInputs.from_arrays(np.zeros((8, 4)), np.zeros((8, 2)))

    with pytest.raises(DimensionError):
        embed(wrong_features, tiny_params)
    with pytest.raises(DimensionError):
        embed(wrong_pe, tiny_params)


def test_inputs_row_mismatch():
    """Test features and PE must have the same node count."""
    with pytest.raises(DimensionError):
        EncoderInputs.from_arrays(np.zeros((8, 4)), np.zeros((7, 3)))


def test_attention_input_width(tiny_params):
    """Test attention rejects inputs of the wrong width."""
    with pytest.raises(DimensionError):
        multi_head_attention(Tensor(np.zeros((8, 10))), tiny_params, 0)


def test_reparameterize_shape_mismatch():
    """Test mu and logvar must have equal shapes."""
    with pytest.raises(DimensionError):
        reparameterize(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 2))))


def test_reparameterize_scale():
    """Test the sample spread follows exp(0.5 * logvar)."""
    mu = Tensor(np.zeros((2000, 1)))
    logvar = Tensor(np.full((2000, 1), np.log(4.0)))

    z = reparameterize(mu, logvar, np.random.default_rng(0)).data

    assert abs(z.std() - 2.0) < 0.1


def _softmax(row):
    e = np.exp(row - row.max())
    return e / e.sum()


def test_attention_matches_explicit_loops(tiny_params):
    """Test attention against a per-head, per-node loop."""
    x = np.random.default_rng(6).standard_normal((6, 16))
    d_k = tiny_params.config.head_dim

    out, weights = multi_head_attention(Tensor(x), tiny_params, 1)

    heads = []
    for h in range(2):
        w_q = tiny_params[f"layers.1.heads.{h}.W_Q"].data
        w_k = tiny_params[f"layers.1.heads.{h}.W_K"].data
        w_v = tiny_params[f"layers.1.heads.{h}.W_V"].data
        q, k, v = x @ w_q, x @ w_k, x @ w_v
        head = np.zeros((6, d_k))
        for i in range(6):
            logits = np.array(
                [q[i] @ k[j] / np.sqrt(d_k) for j in range(6)]
            )
            alpha = _softmax(logits)
            np.testing.assert_allclose(weights[h][i], alpha, atol=1e-12)
            head[i] = sum(alpha[j] * v[j] for j in range(6))
        heads.append(head)
    expected = np.hstack(heads) @ tiny_params["layers.1.W_O"].data

    np.testing.assert_allclose(out.data, expected, atol=1e-12)


def test_zero_query_key_gives_uniform_attention(tiny_params):
    """Test zero logits spread attention evenly over all nodes."""
    params = tiny_params.copy()
    for h in range(2):
        params[f"layers.0.heads.{h}.W_Q"].data[:] = 0.0
        params[f"layers.0.heads.{h}.W_K"].data[:] = 0.0

    _, weights = multi_head_attention(
        Tensor(np.random.default_rng(1).standard_normal((5, 16))), params, 0
    )

    for w in weights:
        np.testing.assert_allclose(w, np.full((5, 5), 0.2), atol=1e-15)


def test_embed_is_linear(tiny_params):
    """Test embedding splits into feature and PE contributions."""
    rng = np.random.default_rng(3)
    x1, x2 = rng.standard_normal((8, 4)), rng.standard_normal((8, 4))
    pe = rng.standard_normal((8, 3))

    both = embed(EncoderInputs.from_arrays(x1 + x2, pe), tiny_params)
    first = embed(EncoderInputs.from_arrays(x1, pe), tiny_params)
    second = embed(
        EncoderInputs.from_arrays(x2, np.zeros((8, 3))), tiny_params
    )

    np.testing.assert_allclose(
        both.data, first.data + second.data, atol=1e-12
    )


def test_zero_weight_layer_is_double_layer_norm(tiny_params):
    """Test a layer with zero weights reduces to two LayerNorms."""
    params = tiny_params.copy()
    for name in params:
        if name.startswith("layers.0.") and ".ln" not in name:
            params[name].data[:] = 0.0
    x = np.random.default_rng(8).standard_normal((5, 16)) * 3.0 + 1.0

    out, _ = transformer_layer(Tensor(x), params, 0)

    def norm(a):
        c = a - a.mean(axis=1, keepdims=True)
        return c / np.sqrt((c * c).mean(axis=1, keepdims=True) + 1e-5)

    np.testing.assert_allclose(out.data, norm(norm(x)), atol=1e-12)


def test_empty_layer_stack():
    """Test a zero-layer model maps the embedding straight to the heads."""
    config = ModelConfig(layers=0, heads=1, hidden=4, latent=2, pe_dim=2)
    params = init_params(config, 3, np.random.default_rng(0))
    inputs = EncoderInputs.from_arrays(
        np.random.default_rng(1).standard_normal((5, 3)),
        np.random.default_rng(2).standard_normal((5, 2)),
    )

    mu = encode(inputs, params).mu.data

    h0 = embed(inputs, params).data
    np.testing.assert_allclose(mu, h0 @ params["head.W_mu"].data)


def test_reparameterize_moments():
    """Test standard-normal samples at mu = 0, logvar = 0."""
    zeros = Tensor(np.zeros((100_000, 1)))

    z = reparameterize(zeros, zeros, np.random.default_rng(11)).data

    assert abs(z.mean()) < 0.02
    assert abs(z.var() - 1.0) < 0.02


def test_reparameterize_vanishing_variance():
    """Test a very negative logvar collapses the sample onto mu."""
    mu = Tensor(np.array([[1.5, -2.0]]))
    logvar = Tensor(np.full((1, 2), -100.0))

    z = reparameterize(mu, logvar, np.random.default_rng(0)).data

    np.testing.assert_allclose(z, mu.data, atol=1e-20)
