"""
In-process cache for positional encodings.

Eigendecompositions dominate start-up time on larger graphs and every
seed of an experiment shares one adjacency per split, so encodings are
kept in a small LRU keyed by adjacency hash, width and solver.
"""

import hashlib
from typing import Callable, Dict, Optional, TypeVar

import numpy as np
from cachetools import LRUCache

from ggt_vae.utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_MAX_SIZE = 32

T = TypeVar("T")


class CacheManager:
    """LRU cache with hit/miss counters."""

    def __init__(self, max_size: int = DEFAULT_MAX_SIZE):
        self._cache: LRUCache = LRUCache(maxsize=max_size)
        self._hits = 0
        self._misses = 0
        logger.debug(f"CacheManager initialized (max_size={max_size})")

    def get(self, key: str) -> Optional[object]:
        """Cached value for ``key``, or None (counted as a miss)."""
        value = self._cache.get(key)
        if value is None:
            self._misses += 1
            return None
        self._hits += 1
        return value

    def set(self, key: str, value: object) -> None:
        self._cache[key] = value

    def get_or_compute(self, key: str, compute: Callable[[], T]) -> T:
        """
        Return the cached value or compute, store and return it.

        Args:
            key: Cache key, see :func:`generate_pe_key`
            compute: Called only on a miss

        Returns:
            The cached or freshly computed value
        """
        value = self.get(key)
        if value is not None:
            logger.debug(f"Cache hit: {key}")
            return value  # type: ignore[return-value]
        logger.debug(f"Cache miss: {key}")
        fresh = compute()
        self._cache[key] = fresh
        return fresh

    def invalidate(self, key: str) -> bool:
        """Drop ``key``; True if it was cached."""
        return self._cache.pop(key, None) is not None

    def clear(self) -> None:
        self._cache.clear()

    def __len__(self) -> int:
        return len(self._cache)

    def get_stats(self) -> Dict[str, int]:
        return {"hits": self._hits, "misses": self._misses}


_cache_manager: Optional[CacheManager] = None


def get_cache_manager() -> CacheManager:
    """Process-wide cache, created on first use."""
    global _cache_manager
    if _cache_manager is None:
        _cache_manager = CacheManager()
    return _cache_manager


def configure_cache_manager(max_size: int) -> CacheManager:
    """Replace the process-wide cache with an empty one of ``max_size``."""
    global _cache_manager
    _cache_manager = CacheManager(max_size=max_size)
    return _cache_manager


def generate_pe_key(adjacency_hash: str, k: int, solver: str) -> str:
    return f"pe:{adjacency_hash}:{k}:{solver}"


def hash_array(values: np.ndarray) -> str:
    """SHA-256 of an array's shape and raw bytes."""
    digest = hashlib.sha256()
    digest.update(np.asarray(values.shape, dtype=np.int64).tobytes())
    digest.update(np.ascontiguousarray(values).tobytes())
    return digest.hexdigest()
