"""
Parameter store for the graph-transformer VAE.

Parameters are addressed by dotted paths::

    embed.W_x, embed.W_p
    layers.{l}.heads.{h}.W_Q | W_K | W_V
    layers.{l}.W_O
    layers.{l}.ffn.W1 | b1 | W2 | b2
    layers.{l}.ln1.gamma | beta, layers.{l}.ln2.gamma | beta
    head.W_mu | b_mu | W_logvar | b_logvar

The fixed serialization order is alphabetical by path.
"""

from typing import Dict, Iterator, List, Mapping, Tuple

import numpy as np

from ggt_vae.exceptions import DimensionError
from ggt_vae.numerics import Tensor
from ggt_vae.utils.config import ModelConfig
from ggt_vae.utils.logging import get_logger

logger = get_logger(__name__)

Shape = Tuple[int, int]

# Initializer kinds.
XAVIER = "xavier"
ZEROS = "zeros"
ONES = "ones"


def parameter_layout(
    config: ModelConfig, d_node: int
) -> List[Tuple[str, Shape, str]]:
    """Construction order of ``(path, shape, initializer)`` triples."""
    d_hid = config.hidden
    d_head = config.head_dim
    d_ffn = config.ffn_mult * d_hid
    layout: List[Tuple[str, Shape, str]] = [
        ("embed.W_x", (d_node, d_hid), XAVIER),
        ("embed.W_p", (config.pe_dim, d_hid), XAVIER),
    ]
    for layer in range(config.layers):
        prefix = f"layers.{layer}"
        for head in range(config.heads):
            for proj in ("W_Q", "W_K", "W_V"):
                layout.append(
                    (f"{prefix}.heads.{head}.{proj}", (d_hid, d_head), XAVIER)
                )
        layout += [
            (f"{prefix}.W_O", (d_hid, d_hid), XAVIER),
            (f"{prefix}.ffn.W1", (d_hid, d_ffn), XAVIER),
            (f"{prefix}.ffn.b1", (1, d_ffn), ZEROS),
            (f"{prefix}.ffn.W2", (d_ffn, d_hid), XAVIER),
            (f"{prefix}.ffn.b2", (1, d_hid), ZEROS),
            (f"{prefix}.ln1.gamma", (1, d_hid), ONES),
            (f"{prefix}.ln1.beta", (1, d_hid), ZEROS),
            (f"{prefix}.ln2.gamma", (1, d_hid), ONES),
            (f"{prefix}.ln2.beta", (1, d_hid), ZEROS),
        ]
    layout += [
        ("head.W_mu", (d_hid, config.latent), XAVIER),
        ("head.b_mu", (1, config.latent), ZEROS),
        ("head.W_logvar", (d_hid, config.latent), XAVIER),
        ("head.b_logvar", (1, config.latent), ZEROS),
    ]
    return layout


class ModelParams(Mapping[str, Tensor]):
    """Named trainable tensors plus the config that shaped them.

    Attributes:
        config (ModelConfig): Architecture
        d_node (int): Input feature width
    """

    def __init__(
        self,
        config: ModelConfig,
        d_node: int,
        tensors: Dict[str, Tensor],
    ):
        self.config = config
        self.d_node = d_node
        expected = {
            name: shape for name, shape, _ in parameter_layout(config, d_node)
        }
        if set(expected) != set(tensors):
            missing = sorted(set(expected) - set(tensors))
            extra = sorted(set(tensors) - set(expected))
            raise DimensionError(
                f"Parameter set mismatch (missing={missing[:3]}, "
                f"unexpected={extra[:3]})"
            )
        for name, shape in expected.items():
            if tensors[name].shape != shape:
                raise DimensionError(
                    f"Parameter '{name}' has shape {tensors[name].shape}, "
                    f"expected {shape}"
                )
        self._tensors = tensors

    def __getitem__(self, name: str) -> Tensor:
        return self._tensors[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.names())

    def __len__(self) -> int:
        return len(self._tensors)

    def names(self) -> List[str]:
        """Parameter paths in serialization order."""
        return sorted(self._tensors)

    def num_parameters(self) -> int:
        return int(sum(t.data.size for t in self._tensors.values()))

    def zero_grad(self) -> None:
        for tensor in self._tensors.values():
            tensor.zero_grad()

    def state_dict(self) -> Dict[str, np.ndarray]:
        """Copies of every parameter value."""
        return {name: t.data.copy() for name, t in self._tensors.items()}

    def load_state(self, state: Mapping[str, np.ndarray]) -> None:
        """
        Overwrite parameter values in place.

        Raises:
            DimensionError: Missing name or shape mismatch
        """
        for name, tensor in self._tensors.items():
            if name not in state:
                raise DimensionError(f"State has no entry for '{name}'")
            values = np.asarray(state[name], dtype=np.float64)
            if values.shape != tensor.data.shape:
                raise DimensionError(
                    f"State for '{name}' has shape {values.shape}, "
                    f"expected {tensor.data.shape}"
                )
            tensor.data = values.copy()

    def copy(self) -> "ModelParams":
        return ModelParams(
            self.config,
            self.d_node,
            {
                name: Tensor(t.data.copy(), requires_grad=True, name=name)
                for name, t in self._tensors.items()
            },
        )


def xavier_uniform(shape: Shape, rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-limit, limit, size=shape)


def init_params(
    config: ModelConfig, d_node: int, rng: np.random.Generator
) -> ModelParams:
    """
    Initialize a fresh parameter set.

    Projections are Xavier-uniform, biases zero, LayerNorm gamma one and
    beta zero. Draws follow the construction order of
    :func:`parameter_layout`, so the result is a pure function of the
    generator state.

    Args:
        config: Architecture
        d_node: Input feature width
        rng: Generator to draw from

    Returns:
        ModelParams: Parameters with ``requires_grad=True``
    """
    if d_node < 1:
        raise DimensionError(f"d_node must be at least 1, got {d_node}")
    tensors: Dict[str, Tensor] = {}
    for name, shape, kind in parameter_layout(config, d_node):
        if kind == XAVIER:
            values = xavier_uniform(shape, rng)
        elif kind == ONES:
            values = np.ones(shape)
        else:
            values = np.zeros(shape)
        tensors[name] = Tensor(values, requires_grad=True, name=name)
    params = ModelParams(config, d_node, tensors)
    logger.debug(
        f"Initialized {len(params)} tensors, "
        f"{params.num_parameters()} parameters"
    )
    return params
