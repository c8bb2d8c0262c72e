"""
Finite-difference gradient checking.

Compares reverse-mode gradients with central differences in float64.
"""

from typing import Callable, Mapping, Optional

import numpy as np

from ggt_vae.utils.logging import get_logger

from .tensor import Tensor

logger = get_logger(__name__)

DEFAULT_STEP = 1e-5

# Denominator floor when a whole parameter has a vanishing gradient.
_ERROR_FLOOR = 1e-6


def relative_error(
    analytic: float, numeric: float, scale: float = 0.0
) -> float:
    """
    Relative error of one entry.

    Args:
        analytic: Reverse-mode derivative
        numeric: Central-difference derivative
        scale: Largest derivative magnitude of the same parameter; tiny
            entries are measured against it instead of themselves

    Returns:
        float: ``|a - n| / max(|a|, |n|, scale, floor)``
    """
    denom = max(abs(analytic), abs(numeric), scale, _ERROR_FLOOR)
    return abs(analytic - numeric) / denom


def grad_check(
    f: Callable[[], Tensor],
    params: Mapping[str, Tensor],
    h: float = DEFAULT_STEP,
    entries: Optional[int] = None,
    seed: int = 0,
) -> float:
    """
    Worst relative error between reverse-mode and numeric gradients.

    Each entry is compared relative to the largest gradient entry of its
    parameter, so near-zero entries do not amplify difference noise.

    Args:
        f: Deterministic function returning a 1x1 tensor built from
            ``params``
        params: Tensors to differentiate against (``requires_grad=True``)
        h: Central-difference step
        entries: When set, check only this many randomly chosen entries
            per parameter; otherwise every entry
        seed: Seed for choosing the checked entries

    Returns:
        float: Maximum relative error over all checked entries
    """
    for tensor in params.values():
        tensor.zero_grad()
    f().backward()
    analytic = {
        name: (
            np.zeros_like(t.data) if t.grad is None else t.grad.copy()
        )
        for name, t in params.items()
    }

    rng = np.random.default_rng(seed)
    worst = 0.0
    worst_at = ""
    for name, tensor in params.items():
        flat = tensor.data.reshape(-1)
        grad = analytic[name].reshape(-1)
        scale = float(np.abs(grad).max()) if grad.size else 0.0
        indices = np.arange(flat.size)
        if entries is not None and entries < flat.size:
            indices = rng.choice(flat.size, size=entries, replace=False)
        for i in indices:
            original = flat[i]
            flat[i] = original + h
            plus = f().item()
            flat[i] = original - h
            minus = f().item()
            flat[i] = original
            numeric = (plus - minus) / (2.0 * h)
            err = relative_error(grad[i], numeric, scale)
            if err > worst:
                worst = err
                worst_at = f"{name}[{i}]"

    logger.debug(f"grad_check worst relative error {worst:.3e} {worst_at}")
    return worst
