"""
Binary checkpoint format.

Layout::

    b"GGTVAE1\\n"                magic
    uint64 little-endian          header length in bytes
    UTF-8 JSON (sorted keys)      header
    float64 little-endian blob    parameters, alphabetical by path

The header carries the model config, ``d_node``, the ordered shape table
and whatever run metadata the caller adds (epoch, seed, metrics, graph
hash, data config).
"""

import json
import struct
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np
from pydantic import ValidationError

from ggt_vae.exceptions import CheckpointError, DimensionError
from ggt_vae.numerics import Tensor
from ggt_vae.utils.config import ModelConfig
from ggt_vae.utils.logging import get_logger

from .params import ModelParams, parameter_layout

logger = get_logger(__name__)

MAGIC = b"GGTVAE1\n"
_LENGTH = struct.Struct("<Q")
_FLOAT = np.dtype("<f8")


def save_checkpoint(
    path: Union[str, Path],
    params: ModelParams,
    header: Dict[str, Any],
) -> None:
    """
    Write parameters and metadata.

    Args:
        path: Output file
        params: Parameters to store
        header: Extra JSON-serializable metadata; ``model``, ``d_node``
            and ``shapes`` are filled in here
    """
    names = params.names()
    doc = dict(header)
    doc["model"] = params.config.model_dump()
    doc["d_node"] = params.d_node
    doc["shapes"] = [[name, list(params[name].shape)] for name in names]
    head = json.dumps(doc, sort_keys=True).encode("utf-8")
    blob = b"".join(
        np.ascontiguousarray(params[name].data, dtype=_FLOAT).tobytes()
        for name in names
    )
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(_LENGTH.pack(len(head)))
        f.write(head)
        f.write(blob)
    logger.debug(f"Wrote checkpoint {path} ({len(names)} tensors)")


def load_checkpoint(
    path: Union[str, Path],
) -> Tuple[ModelParams, Dict[str, Any]]:
    """
    Read a checkpoint written by :func:`save_checkpoint`.

    Returns:
        Tuple[ModelParams, Dict[str, Any]]: Parameters and header

    Raises:
        CheckpointError: Missing file, bad magic, truncated data or a
            shape table that disagrees with the stored config
    """
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}") from e

    if not data.startswith(MAGIC):
        raise CheckpointError(f"{path}: not a GGT-VAE checkpoint")
    offset = len(MAGIC)
    if len(data) < offset + _LENGTH.size:
        raise CheckpointError(f"{path}: truncated header length")
    (head_len,) = _LENGTH.unpack_from(data, offset)
    offset += _LENGTH.size
    if len(data) < offset + head_len:
        raise CheckpointError(f"{path}: truncated header")
    try:
        header = json.loads(data[offset:offset + head_len].decode("utf-8"))
        config = ModelConfig.model_validate(header["model"])
        d_node = int(header["d_node"])
        shapes = [(str(n), tuple(s)) for n, s in header["shapes"]]
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path}: malformed header: {e}") from e
    except (KeyError, TypeError, ValueError, ValidationError) as e:
        raise CheckpointError(f"{path}: incomplete header: {e}") from e
    offset += head_len

    expected = sorted(
        (name, shape) for name, shape, _ in parameter_layout(config, d_node)
    )
    if shapes != expected:
        raise CheckpointError(
            f"{path}: shape table does not match the stored config"
        )

    total = sum(int(np.prod(shape)) for _, shape in shapes)
    blob = data[offset:]
    if len(blob) != total * _FLOAT.itemsize:
        raise CheckpointError(
            f"{path}: parameter blob has {len(blob)} bytes, "
            f"expected {total * _FLOAT.itemsize}"
        )
    values = np.frombuffer(blob, dtype=_FLOAT)

    tensors: Dict[str, Tensor] = {}
    cursor = 0
    for name, shape in shapes:
        size = int(np.prod(shape))
        array = values[cursor:cursor + size].reshape(shape).astype(np.float64)
        tensors[name] = Tensor(array, requires_grad=True, name=name)
        cursor += size
    if not all(np.isfinite(t.data).all() for t in tensors.values()):
        raise CheckpointError(f"{path}: non-finite parameter values")
    try:
        params = ModelParams(config, d_node, tensors)
    except DimensionError as e:
        raise CheckpointError(f"{path}: {e}") from e
    return params, header
