"""Dense tensors, reverse-mode differentiation and the AdamW optimizer."""

from .gradcheck import grad_check
from .optim import AdamWState, adamw_step
from .tensor import (
    Tensor,
    add,
    add_scalar,
    bce,
    concat_cols,
    elementwise,
    exp,
    gather_rows,
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

__all__ = [
    "AdamWState",
    "Tensor",
    "adamw_step",
    "add",
    "add_scalar",
    "bce",
    "concat_cols",
    "elementwise",
    "exp",
    "gather_rows",
    "grad_check",
    "layer_norm",
    "mask_diagonal",
    "matmul",
    "mean_all",
    "mul",
    "no_grad",
    "relu",
    "row_dot",
    "scale",
    "sigmoid",
    "softmax_rows",
    "sub",
    "sum_all",
    "transpose",
]
