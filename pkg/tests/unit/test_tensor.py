"""
Unit tests for the Tensor autodiff module.
"""

import numpy as np
import pytest

from ggt_vae.exceptions import DimensionError, NonFiniteError
from ggt_vae.numerics import (
    Tensor,
    add,
    bce,
    concat_cols,
    elementwise,
    exp,
    gather_rows,
    grad_check,
    layer_norm,
    mask_diagonal,
    matmul,
    mean_all,
    mul,
    no_grad,
    relu,
    row_dot,
    scale,
    sigmoid,
    softmax_rows,
    sub,
    sum_all,
    transpose,
)


def _leaf(shape, seed=0, name=None):
    rng = np.random.default_rng(seed)
    return Tensor(rng.standard_normal(shape), requires_grad=True, name=name)


def test_tensor_promotes_to_2d():
    """Test scalars and vectors become 2-D matrices."""
    assert Tensor(3.0).shape == (1, 1)
    assert Tensor([1.0, 2.0, 3.0]).shape == (1, 3)


def test_tensor_rejects_3d():
    """Test that 3-D arrays are rejected."""
    with pytest.raises(DimensionError):
        Tensor(np.zeros((2, 2, 2)))


def test_item_requires_1x1():
    """Test item() on a non-scalar tensor."""
    with pytest.raises(DimensionError):
        Tensor(np.zeros((2, 2))).item()


def test_matmul_shape_mismatch():
    """Test matmul with incompatible inner dimensions."""
    with pytest.raises(DimensionError):
        matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 3))))


def test_binary_shape_mismatch():
    """Test elementwise ops with different shapes."""
    with pytest.raises(DimensionError):
        mul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((3, 2))))


def test_add_broadcasts_row_bias():
    """Test that a 1 x d bias broadcasts over rows and reduces its grad."""
    x = _leaf((4, 3))
    b = _leaf((1, 3), seed=1)
    sum_all(add(x, b)).backward()

    np.testing.assert_allclose(b.grad, np.full((1, 3), 4.0))
    np.testing.assert_allclose(x.grad, np.ones((4, 3)))


def test_backward_accumulates_shared_input():
    """Test gradients from two uses of one tensor are summed."""
    x = _leaf((2, 2))
    sum_all(add(x, x)).backward()

    np.testing.assert_allclose(x.grad, np.full((2, 2), 2.0))


def test_matmul_gradient_values():
    """Test matmul gradients against the closed form."""
    a = _leaf((3, 4))
    b = _leaf((4, 2), seed=1)
    sum_all(matmul(a, b)).backward()

    np.testing.assert_allclose(a.grad, np.ones((3, 2)) @ b.data.T)
    np.testing.assert_allclose(b.grad, a.data.T @ np.ones((3, 2)))


def test_no_grad_records_nothing():
    """Test that no_grad disables graph construction."""
    x = _leaf((2, 2))
    with no_grad():
        y = sum_all(mul(x, x))

    assert not y.requires_grad
    y.backward()
    assert x.grad is None


def test_constant_inputs_get_no_grad():
    """Test that only tensors requiring gradients receive them."""
    x = _leaf((2, 2))
    c = Tensor(np.ones((2, 2)))
    sum_all(mul(x, c)).backward()

    assert c.grad is None
    assert x.grad is not None


def test_sigmoid_value():
    """Test sigmoid(2.1972) is close to 0.9."""
    value = sigmoid(Tensor(2.1972)).item()

    assert abs(value - 0.9) < 1e-4


def test_sigmoid_is_stable_for_large_inputs():
    """Test sigmoid does not overflow at large magnitudes."""
    out = sigmoid(Tensor([[-800.0, 0.0, 800.0]])).data

    np.testing.assert_allclose(out, [[0.0, 0.5, 1.0]])


def test_exp_overflow_raises():
    """Test exp overflow is reported as a non-finite value."""
    with pytest.raises(NonFiniteError):
        exp(Tensor(1000.0))


def test_softmax_rows_sum_to_one():
    """Test row-wise softmax normalization with large logits."""
    x = Tensor(np.array([[1000.0, 1000.0], [1.0, 2.0]]))
    out = softmax_rows(x).data

    np.testing.assert_allclose(out.sum(axis=1), [1.0, 1.0])
    np.testing.assert_allclose(out[0], [0.5, 0.5])


def test_layer_norm_normalizes_rows():
    """Test layer norm output has zero mean and unit variance per row."""
    x = Tensor(np.random.default_rng(0).standard_normal((5, 8)) * 3 + 2)
    gamma = Tensor(np.ones((1, 8)))
    beta = Tensor(np.zeros((1, 8)))
    out = layer_norm(x, gamma, beta).data

    np.testing.assert_allclose(out.mean(axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(out.var(axis=1), 1.0, atol=1e-3)


def test_layer_norm_rejects_bad_affine():
    """Test layer norm validates the affine parameter shapes."""
    with pytest.raises(DimensionError):
        layer_norm(
            Tensor(np.zeros((2, 3))),
            Tensor(np.ones((1, 2))),
            Tensor(np.zeros((1, 3))),
        )


def test_mask_diagonal():
    """Test the diagonal is zeroed and passes no gradient."""
    x = _leaf((3, 3))
    out = mask_diagonal(x)
    sum_all(out).backward()

    assert np.all(np.diag(out.data) == 0.0)
    np.testing.assert_allclose(np.diag(x.grad), 0.0)
    assert x.grad[0, 1] == 1.0


def test_mask_diagonal_requires_square():
    """Test mask_diagonal on a non-square matrix."""
    with pytest.raises(DimensionError):
        mask_diagonal(Tensor(np.zeros((2, 3))))


def test_bce_known_value():
    """Test BCE of p=0.5 is log 2."""
    loss = bce(Tensor([[0.5], [0.5]]), np.array([[1.0], [0.0]]))

    assert abs(loss.item() - np.log(2.0)) < 1e-12


def test_bce_clamps_extremes():
    """Test BCE stays finite for probabilities of exactly 0 and 1."""
    loss = bce(Tensor([[0.0], [1.0]]), np.array([[1.0], [0.0]]))

    assert np.isfinite(loss.item())


def test_elementwise_dispatch():
    """Test the elementwise dispatcher matches the direct ops."""
    x = Tensor(np.array([[-1.0, 2.0]]))

    np.testing.assert_allclose(elementwise(x, "relu").data, relu(x).data)
    np.testing.assert_allclose(
        elementwise(x, "scale", factor=3.0).data, [[-3.0, 6.0]]
    )
    with pytest.raises(ValueError):
        elementwise(x, "tanh")
    with pytest.raises(ValueError):
        elementwise(x, "add")


def test_gather_rows_and_row_dot():
    """Test gathered row inner products."""
    z = Tensor(np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 4.0]]))
    left = gather_rows(z, np.array([0, 2]))
    right = gather_rows(z, np.array([2, 1]))

    np.testing.assert_allclose(row_dot(left, right).data, [[3.0], [8.0]])


def test_composite_gradients_match_finite_differences():
    """Test reverse-mode gradients of a composite expression."""
    a = _leaf((4, 3), seed=1, name="a")
    b = _leaf((3, 3), seed=2, name="b")
    gamma = _leaf((1, 3), seed=3, name="gamma")
    beta = _leaf((1, 3), seed=4, name="beta")
    params = {"a": a, "b": b, "gamma": gamma, "beta": beta}

    def f():
        h = softmax_rows(matmul(a, b))
        h = layer_norm(add(h, a), gamma, beta)
        h = concat_cols([h, scale(h, 0.5)])
        s = sigmoid(matmul(h, transpose(h)))
        return mean_all(sub(mask_diagonal(s), mul(s, s)))

    assert grad_check(f, params) < 1e-4


def test_bce_gradient_matches_finite_differences():
    """Test the BCE gradient through a sigmoid."""
    logits = _leaf((6, 1), seed=5, name="logits")
    target = np.array([[1.0], [0.0], [1.0], [0.0], [1.0], [0.0]])

    def f():
        return bce(sigmoid(logits), target)

    assert grad_check(f, {"logits": logits}) < 1e-4
