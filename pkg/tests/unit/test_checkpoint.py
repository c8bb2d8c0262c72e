"""
Unit tests for checkpoint files.
"""

import json
import struct

import numpy as np
import pytest

from ggt_vae.exceptions import CheckpointError
from ggt_vae.model import load_checkpoint, save_checkpoint
from ggt_vae.model.checkpoint import MAGIC


def test_checkpoint_restores_parameters(tmp_path, tiny_params):
    """Test saved parameters load back bit for bit with their header."""
    path = tmp_path / "model.ggt"
    save_checkpoint(path, tiny_params, {"epoch": 12, "seed": 3})

    params, header = load_checkpoint(path)

    assert header["epoch"] == 12
    assert header["seed"] == 3
    assert header["d_node"] == 4
    assert params.config == tiny_params.config
    for name in tiny_params:
        assert np.array_equal(params[name].data, tiny_params[name].data)


def test_checkpoint_is_deterministic(tmp_path, tiny_params):
    """Test the same parameters give byte-identical files."""
    a, b = tmp_path / "a.ggt", tmp_path / "b.ggt"
    save_checkpoint(a, tiny_params, {"epoch": 1})
    save_checkpoint(b, tiny_params.copy(), {"epoch": 1})

    assert a.read_bytes() == b.read_bytes()


def test_checkpoint_bad_magic(tmp_path):
    """Test foreign files are rejected."""
    path = tmp_path / "x.ggt"
    path.write_bytes(b"PK\x03\x04 not a checkpoint")

    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_checkpoint_missing_file(tmp_path):
    """Test a missing file is a checkpoint error."""
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "absent.ggt")


def test_checkpoint_truncated_blob(tmp_path, tiny_params):
    """Test a truncated parameter blob is detected."""
    path = tmp_path / "model.ggt"
    save_checkpoint(path, tiny_params, {})
    path.write_bytes(path.read_bytes()[:-8])

    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_checkpoint_shape_table_mismatch(tmp_path, tiny_params):
    """Test a header whose config disagrees with its shape table."""
    path = tmp_path / "model.ggt"
    save_checkpoint(path, tiny_params, {})
    data = path.read_bytes()
    offset = len(MAGIC)
    (head_len,) = struct.unpack_from("<Q", data, offset)
    start = offset + 8
    header = json.loads(data[start:start + head_len])
    header["model"]["latent"] = 5
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    path.write_bytes(
        MAGIC + struct.pack("<Q", len(head)) + head
        + data[start + head_len:]
    )

    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_checkpoint_non_finite(tmp_path, tiny_params):
    """Test NaN parameters are refused on load."""
    tiny_params["head.b_mu"].data[0, 0] = np.nan
    path = tmp_path / "model.ggt"
    save_checkpoint(path, tiny_params, {})

    with pytest.raises(CheckpointError):
        load_checkpoint(path)
