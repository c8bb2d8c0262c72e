"""
AdamW optimizer.

Adam moment estimates with weight decay applied separately from the
gradient-based update (decoupled decay).
"""

from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from ggt_vae.exceptions import DimensionError, MissingGradientError
from ggt_vae.utils.logging import get_logger

from .tensor import Tensor

logger = get_logger(__name__)

DEFAULT_LR = 1e-3
DEFAULT_WEIGHT_DECAY = 5e-4
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPS = 1e-8


@dataclass
class AdamWState:
    """Optimizer state.

    Attributes:
        step (int): Number of updates applied so far
        m (Dict[str, np.ndarray]): First-moment buffer per parameter
        v (Dict[str, np.ndarray]): Second-moment buffer per parameter
        lr (float): Learning rate
        beta1 (float): First-moment decay
        beta2 (float): Second-moment decay
        eps (float): Denominator guard
        weight_decay (float): Decoupled decay coefficient
    """

    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    lr: float = DEFAULT_LR
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    eps: float = DEFAULT_EPS
    weight_decay: float = DEFAULT_WEIGHT_DECAY

    @classmethod
    def for_params(
        cls,
        params: Mapping[str, Tensor],
        lr: float = DEFAULT_LR,
        weight_decay: float = DEFAULT_WEIGHT_DECAY,
        beta1: float = DEFAULT_BETA1,
        beta2: float = DEFAULT_BETA2,
        eps: float = DEFAULT_EPS,
    ) -> "AdamWState":
        """Create zeroed moment buffers shaped like ``params``."""
        return cls(
            step=0,
            m={k: np.zeros_like(t.data) for k, t in params.items()},
            v={k: np.zeros_like(t.data) for k, t in params.items()},
            lr=lr,
            beta1=beta1,
            beta2=beta2,
            eps=eps,
            weight_decay=weight_decay,
        )


def adamw_step(params: Mapping[str, Tensor], state: AdamWState) -> None:
    """
    Apply one AdamW update in place.

    Args:
        params: Parameters by name, gradients populated
        state: Optimizer state, updated in place

    Raises:
        MissingGradientError: A parameter has no gradient
        DimensionError: A moment buffer does not match its parameter
    """
    for name, tensor in params.items():
        if tensor.grad is None:
            raise MissingGradientError(name)

    state.step += 1
    t = state.step
    correction1 = 1.0 - state.beta1**t
    correction2 = 1.0 - state.beta2**t

    for name, tensor in params.items():
        grad = tensor.grad
        assert grad is not None
        m = state.m.setdefault(name, np.zeros_like(tensor.data))
        v = state.v.setdefault(name, np.zeros_like(tensor.data))
        if m.shape != tensor.data.shape or v.shape != tensor.data.shape:
            raise DimensionError(
                f"Moment buffers for '{name}' have shape {m.shape}, "
                f"parameter has {tensor.data.shape}"
            )

        if state.weight_decay:
            tensor.data *= 1.0 - state.lr * state.weight_decay

        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad * grad

        m_hat = m / correction1
        v_hat = v / correction2
        tensor.data -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)

    logger.debug(f"AdamW step {t} applied to {len(params)} parameters")
