"""
Dense 2-D tensors with reverse-mode differentiation.

Every tensor wraps a row-major ``float64`` numpy array of shape
``(rows, cols)``. Operations record their parents and a backward closure
while gradient recording is enabled; :meth:`Tensor.backward` walks the
recorded graph in reverse topological order and accumulates gradients
into every tensor created with ``requires_grad=True``.

Broadcasting is limited to a ``1 x n`` row vector against an ``m x n``
matrix (bias and LayerNorm affine terms).
"""

from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ggt_vae.exceptions import DimensionError, NonFiniteError

ArrayLike = Union[np.ndarray, Sequence, float, int]
BackwardFn = Callable[[np.ndarray], None]

BCE_EPS = 1e-7
LAYER_NORM_EPS = 1e-5

_grad_enabled = True


@contextmanager
def no_grad() -> Iterator[None]:
    """Disable graph recording inside the block (evaluation paths)."""
    global _grad_enabled
    previous = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = previous


class Tensor:
    """Dense real matrix with optional gradient accumulation.

    Attributes:
        data (np.ndarray): Values, shape ``(rows, cols)``, float64
        grad (Optional[np.ndarray]): Accumulated gradient, same shape
        requires_grad (bool): Whether gradients flow into this tensor
        name (Optional[str]): Parameter path for leaves, used in errors
    """

    __slots__ = (
        "data",
        "grad",
        "requires_grad",
        "name",
        "_parents",
        "_backward",
    )

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        name: Optional[str] = None,
    ):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1)
        elif arr.ndim != 2:
            raise DimensionError(
                f"Tensor must be 2-D, got array with {arr.ndim} dimensions"
            )
        self.data: np.ndarray = arr
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[BackwardFn] = None

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.data.shape[0], self.data.shape[1])

    @property
    def T(self) -> "Tensor":
        return transpose(self)

    def item(self) -> float:
        if self.data.size != 1:
            raise DimensionError(
                f"item() needs a 1x1 tensor, got {self.shape}"
            )
        return float(self.data[0, 0])

    def numpy(self) -> np.ndarray:
        """Return a copy of the values."""
        return self.data.copy()

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def _accumulate(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64, copy=True)
        else:
            self.grad += grad

    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        """Back-propagate from this tensor.

        Args:
            grad: Seed gradient; defaults to ones (the usual choice for a
                1x1 loss).
        """
        if not self.requires_grad:
            return
        seed = np.ones_like(self.data) if grad is None else grad
        if seed.shape != self.data.shape:
            raise DimensionError(
                f"Seed gradient {seed.shape} does not match {self.shape}"
            )
        self._accumulate(seed)

        for node in reversed(_topological_order(self)):
            if node._backward is None or node.grad is None:
                continue
            node._backward(node.grad)
            # Intermediate results are not needed once propagated.
            node._backward = None
            node._parents = ()
            if node is not self:
                node.grad = None

    def __repr__(self) -> str:
        label = f", name='{self.name}'" if self.name else ""
        return (
            f"Tensor(shape={self.shape}, "
            f"requires_grad={self.requires_grad}{label})"
        )

    def __add__(self, other: "Tensor") -> "Tensor":
        return add(self, other)

    def __sub__(self, other: "Tensor") -> "Tensor":
        return sub(self, other)

    def __mul__(self, other: "Tensor") -> "Tensor":
        return mul(self, other)

    def __neg__(self) -> "Tensor":
        return scale(self, -1.0)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return matmul(self, other)


def _topological_order(root: Tensor) -> List[Tensor]:
    order: List[Tensor] = []
    visited = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def _check_finite(values: np.ndarray, op: str) -> None:
    if not np.isfinite(values).all():
        raise NonFiniteError(op)


def _result(
    values: np.ndarray,
    parents: Tuple[Tensor, ...],
    backward: BackwardFn,
    op: str,
) -> Tensor:
    _check_finite(values, op)
    out = Tensor.__new__(Tensor)
    out.data = values
    out.grad = None
    out.name = None
    out.requires_grad = _grad_enabled and any(
        p.requires_grad for p in parents
    )
    if out.requires_grad:
        out._parents = parents
        out._backward = backward
    else:
        out._parents = ()
        out._backward = None
    return out


def _as_tensor(value: Union[Tensor, ArrayLike]) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _reduce_to(grad: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    """Sum a broadcast gradient back to a row-vector operand."""
    if grad.shape == shape:
        return grad
    return grad.sum(axis=0, keepdims=True)


def _check_binary(a: Tensor, b: Tensor, op: str) -> None:
    if a.shape == b.shape:
        return
    if a.cols == b.cols and (a.rows == 1 or b.rows == 1):
        return
    raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} differ")


# ---------------------------------------------------------------- linear


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product ``a @ b``."""
    if a.cols != b.rows:
        raise DimensionError(
            f"matmul: inner dimensions differ ({a.shape} @ {b.shape})"
        )

    def backward(grad: np.ndarray) -> None:
        if a.requires_grad:
            a._accumulate(grad @ b.data.T)
        if b.requires_grad:
            b._accumulate(a.data.T @ grad)

    return _result(a.data @ b.data, (a, b), backward, "matmul")


def transpose(x: Tensor) -> Tensor:
    def backward(grad: np.ndarray) -> None:
        x._accumulate(grad.T)

    return _result(
        np.ascontiguousarray(x.data.T), (x,), backward, "transpose"
    )


def concat_cols(parts: Sequence[Tensor]) -> Tensor:
    """Concatenate tensors with equal row counts side by side."""
    if not parts:
        raise DimensionError("concat_cols: nothing to concatenate")
    rows = parts[0].rows
    for part in parts:
        if part.rows != rows:
            raise DimensionError(
                f"concat_cols: row counts differ ({part.rows} != {rows})"
            )
    bounds = np.cumsum([0] + [p.cols for p in parts])

    def backward(grad: np.ndarray) -> None:
        for part, lo, hi in zip(parts, bounds[:-1], bounds[1:]):
            if part.requires_grad:
                part._accumulate(grad[:, lo:hi])

    values = np.concatenate([p.data for p in parts], axis=1)
    return _result(values, tuple(parts), backward, "concat_cols")


def gather_rows(x: Tensor, index: np.ndarray) -> Tensor:
    """Select rows ``x[index]`` (repeats allowed)."""
    index = np.asarray(index, dtype=np.int64)
    if index.size and (index.min() < 0 or index.max() >= x.rows):
        raise DimensionError(
            f"gather_rows: index out of range for {x.rows} rows"
        )

    def backward(grad: np.ndarray) -> None:
        full = np.zeros_like(x.data)
        np.add.at(full, index, grad)
        x._accumulate(full)

    return _result(x.data[index], (x,), backward, "gather_rows")


def row_dot(a: Tensor, b: Tensor) -> Tensor:
    """Row-wise inner products, shape ``(rows, 1)``."""
    if a.shape != b.shape:
        raise DimensionError(f"row_dot: shapes {a.shape} and {b.shape}")

    def backward(grad: np.ndarray) -> None:
        if a.requires_grad:
            a._accumulate(grad * b.data)
        if b.requires_grad:
            b._accumulate(grad * a.data)

    values = np.sum(a.data * b.data, axis=1, keepdims=True)
    return _result(values, (a, b), backward, "row_dot")


# ------------------------------------------------------------ elementwise


def add(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_binary(a, b, "add")

    def backward(grad: np.ndarray) -> None:
        if a.requires_grad:
            a._accumulate(_reduce_to(grad, a.shape))
        if b.requires_grad:
            b._accumulate(_reduce_to(grad, b.shape))

    return _result(a.data + b.data, (a, b), backward, "add")


def sub(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_binary(a, b, "sub")

    def backward(grad: np.ndarray) -> None:
        if a.requires_grad:
            a._accumulate(_reduce_to(grad, a.shape))
        if b.requires_grad:
            b._accumulate(-_reduce_to(grad, b.shape))

    return _result(a.data - b.data, (a, b), backward, "sub")


def mul(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_binary(a, b, "mul")

    def backward(grad: np.ndarray) -> None:
        if a.requires_grad:
            a._accumulate(_reduce_to(grad * b.data, a.shape))
        if b.requires_grad:
            b._accumulate(_reduce_to(grad * a.data, b.shape))

    return _result(a.data * b.data, (a, b), backward, "mul")


def scale(x: Tensor, factor: float) -> Tensor:
    def backward(grad: np.ndarray) -> None:
        x._accumulate(grad * factor)

    return _result(x.data * factor, (x,), backward, "scale")


def add_scalar(x: Tensor, value: float) -> Tensor:
    def backward(grad: np.ndarray) -> None:
        x._accumulate(grad)

    return _result(x.data + value, (x,), backward, "add_scalar")


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0

    def backward(grad: np.ndarray) -> None:
        x._accumulate(grad * mask)

    return _result(np.where(mask, x.data, 0.0), (x,), backward, "relu")


def _stable_sigmoid(values: np.ndarray) -> np.ndarray:
    out = np.empty_like(values)
    pos = values >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-values[pos]))
    exp_neg = np.exp(values[~pos])
    out[~pos] = exp_neg / (1.0 + exp_neg)
    return out


def sigmoid(x: Tensor) -> Tensor:
    values = _stable_sigmoid(x.data)

    def backward(grad: np.ndarray) -> None:
        x._accumulate(grad * values * (1.0 - values))

    return _result(values, (x,), backward, "sigmoid")


def exp(x: Tensor) -> Tensor:
    with np.errstate(over="ignore"):
        values = np.exp(x.data)

    def backward(grad: np.ndarray) -> None:
        x._accumulate(grad * values)

    return _result(values, (x,), backward, "exp")


ELEMENTWISE_KINDS = ("relu", "sigmoid", "exp", "add", "mul", "scale")


def elementwise(
    x: Tensor,
    kind: str,
    other: Optional[Tensor] = None,
    factor: Optional[float] = None,
) -> Tensor:
    """Dispatch one of the elementwise kinds by name.

    Args:
        x: Operand
        kind: One of ``relu``, ``sigmoid``, ``exp``, ``add``, ``mul``,
            ``scale``
        other: Second operand for ``add`` / ``mul``
        factor: Multiplier for ``scale``

    Raises:
        ValueError: Unknown kind or missing operand
        DimensionError: Binary operands with different shapes
    """
    if kind == "relu":
        return relu(x)
    if kind == "sigmoid":
        return sigmoid(x)
    if kind == "exp":
        return exp(x)
    if kind in ("add", "mul"):
        if other is None:
            raise ValueError(f"elementwise '{kind}' needs a second operand")
        return add(x, other) if kind == "add" else mul(x, other)
    if kind == "scale":
        if factor is None:
            raise ValueError("elementwise 'scale' needs a factor")
        return scale(x, factor)
    raise ValueError(
        f"Unknown elementwise kind '{kind}'. "
        f"Valid kinds: {', '.join(ELEMENTWISE_KINDS)}"
    )


def mask_diagonal(x: Tensor) -> Tensor:
    """Zero the diagonal of a square matrix."""
    if x.rows != x.cols:
        raise DimensionError(f"mask_diagonal: {x.shape} is not square")
    values = x.data.copy()
    np.fill_diagonal(values, 0.0)

    def backward(grad: np.ndarray) -> None:
        masked = grad.copy()
        np.fill_diagonal(masked, 0.0)
        x._accumulate(masked)

    return _result(values, (x,), backward, "mask_diagonal")


# -------------------------------------------------------------- reductions


def sum_all(x: Tensor) -> Tensor:
    def backward(grad: np.ndarray) -> None:
        x._accumulate(np.full_like(x.data, grad[0, 0]))

    return _result(
        np.array([[x.data.sum()]]), (x,), backward, "sum_all"
    )


def mean_all(x: Tensor) -> Tensor:
    count = x.data.size

    def backward(grad: np.ndarray) -> None:
        x._accumulate(np.full_like(x.data, grad[0, 0] / count))

    return _result(
        np.array([[x.data.sum() / count]]), (x,), backward, "mean_all"
    )


# ------------------------------------------------------- composite kernels


def softmax_rows(x: Tensor) -> Tensor:
    """Row-wise softmax, stabilized by subtracting each row maximum."""
    shifted = x.data - x.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    values = e / e.sum(axis=1, keepdims=True)

    def backward(grad: np.ndarray) -> None:
        inner = np.sum(grad * values, axis=1, keepdims=True)
        x._accumulate(values * (grad - inner))

    return _result(values, (x,), backward, "softmax_rows")


def layer_norm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    eps: float = LAYER_NORM_EPS,
) -> Tensor:
    """Normalize each row to zero mean / unit variance, then scale+shift."""
    n = x.cols
    if n < 1:
        raise DimensionError("layer_norm: rows must have at least one entry")
    if gamma.shape != (1, n) or beta.shape != (1, n):
        raise DimensionError(
            f"layer_norm: affine terms must be (1, {n}), "
            f"got {gamma.shape} and {beta.shape}"
        )
    mean = x.data.mean(axis=1, keepdims=True)
    centered = x.data - mean
    var = np.mean(centered * centered, axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    x_hat = centered * inv_std
    values = x_hat * gamma.data + beta.data

    def backward(grad: np.ndarray) -> None:
        if gamma.requires_grad:
            gamma._accumulate(np.sum(grad * x_hat, axis=0, keepdims=True))
        if beta.requires_grad:
            beta._accumulate(np.sum(grad, axis=0, keepdims=True))
        if x.requires_grad:
            g_hat = grad * gamma.data
            x._accumulate(
                inv_std
                / n
                * (
                    n * g_hat
                    - g_hat.sum(axis=1, keepdims=True)
                    - x_hat * np.sum(g_hat * x_hat, axis=1, keepdims=True)
                )
            )

    return _result(values, (x, gamma, beta), backward, "layer_norm")


def bce(
    pred_prob: Tensor,
    target: Union[Tensor, ArrayLike],
    eps: float = BCE_EPS,
) -> Tensor:
    """Mean binary cross-entropy of probabilities against 0/1 targets.

    Predictions are clamped to ``[eps, 1 - eps]``; clamped entries pass
    no gradient.
    """
    t = _as_tensor(target).data
    if t.shape != pred_prob.shape:
        raise DimensionError(
            f"bce: prediction {pred_prob.shape} vs target {t.shape}"
        )
    p = np.clip(pred_prob.data, eps, 1.0 - eps)
    count = p.size
    losses = -(t * np.log(p) + (1.0 - t) * np.log(1.0 - p))
    inside = (pred_prob.data >= eps) & (pred_prob.data <= 1.0 - eps)

    def backward(grad: np.ndarray) -> None:
        d_p = (-t / p + (1.0 - t) / (1.0 - p)) / count
        pred_prob._accumulate(grad[0, 0] * d_p * inside)

    return _result(
        np.array([[losses.sum() / count]]), (pred_prob,), backward, "bce"
    )
