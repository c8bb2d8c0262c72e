"""
Unit tests for the inner-product decoder.
"""

import numpy as np
import pytest

from ggt_vae.exceptions import DimensionError, SelfLoopError
from ggt_vae.model import decode_full, decode_logits, decode_pairs, pair_index
from ggt_vae.numerics import Tensor, grad_check, mean_all


def test_decode_pairs_value():
    """Test sigmoid(z_u . z_v) for a pair with inner product ln 9."""
    z = Tensor(np.array([[np.log(9.0), 0.0], [1.0, 0.0], [0.0, 1.0]]))

    probs = decode_pairs(z, [(0, 1), (1, 2)]).data

    np.testing.assert_allclose(probs, [[0.9], [0.5]], atol=1e-12)


def test_decode_is_symmetric():
    """Test (u, v) and (v, u) score identically."""
    z = Tensor(np.random.default_rng(0).standard_normal((5, 3)))

    np.testing.assert_array_equal(
        decode_logits(z, [(1, 3)]).data, decode_logits(z, [(3, 1)]).data
    )


def test_decode_rejects_self_loop():
    """Test u == v pairs cannot be scored."""
    z = Tensor(np.zeros((3, 2)))

    with pytest.raises(SelfLoopError):
        decode_pairs(z, [(0, 1), (2, 2)])


def test_decode_rejects_out_of_range():
    """Test node ids must exist."""
    with pytest.raises(DimensionError):
        pair_index([(0, 3)], 3)


def test_decode_full():
    """Test the dense reconstruction is symmetric with a zero diagonal."""
    z = Tensor(np.random.default_rng(1).standard_normal((6, 3)))

    a_hat = decode_full(z).data

    assert np.array_equal(a_hat, a_hat.T)
    assert np.all(np.diag(a_hat) == 0.0)
    np.testing.assert_allclose(
        a_hat[0, 1], decode_pairs(z, [(0, 1)]).item(), atol=1e-15
    )


def test_decoder_gradients():
    """Test decoder gradients against finite differences."""
    z = Tensor(
        np.random.default_rng(2).standard_normal((5, 3)),
        requires_grad=True,
        name="z",
    )

    def f():
        return mean_all(decode_pairs(z, [(0, 1), (1, 4), (2, 3), (0, 4)]))

    assert grad_check(f, {"z": z}) < 1e-4


def test_zero_latents_are_neutral():
    """Test every pair scores exactly 0.5 at z = 0."""
    z = Tensor(np.zeros((4, 3)))

    probs = decode_pairs(z, [(0, 1), (1, 2), (2, 3), (0, 3)]).data

    assert np.all(probs == 0.5)


def test_decode_full_identity_latents():
    """Test orthonormal latents give 0.5 off the diagonal."""
    a_hat = decode_full(Tensor(np.eye(4))).data

    expected = np.full((4, 4), 0.5)
    np.fill_diagonal(expected, 0.0)
    np.testing.assert_array_equal(a_hat, expected)


def test_decode_full_matches_pairs():
    """Test every off-diagonal entry equals the pairwise score."""
    z = Tensor(np.random.default_rng(4).standard_normal((5, 2)))
    pairs = [(u, v) for u in range(5) for v in range(5) if u != v]

    a_hat = decode_full(z).data
    probs = decode_pairs(z, pairs).data.ravel()

    for (u, v), p in zip(pairs, probs):
        assert abs(a_hat[u, v] - p) < 1e-12
