"""Symmetric eigensolver and Laplacian positional encodings."""

from .eigen import eigh_symmetric
from .encoding import (
    PositionalEncoding,
    canonicalize_signs,
    compute_laplacian_pe,
    laplacian_pe,
    read_pe_csv,
    write_pe_csv,
)

__all__ = [
    "PositionalEncoding",
    "canonicalize_signs",
    "compute_laplacian_pe",
    "eigh_symmetric",
    "laplacian_pe",
    "read_pe_csv",
    "write_pe_csv",
]
