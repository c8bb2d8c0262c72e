"""
Timing helpers.

Wall-clock measurement for the expensive steps (eigensolves, training
runs); results go to the DEBUG log only.
"""

import time
from functools import wraps
from typing import Any, Callable, Optional, TypeVar, cast

from .logging import get_logger

logger = get_logger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


def measure_time(function: F) -> F:
    """
    Decorator to measure function execution time.

    Args:
        function (Callable): Function to measure

    Returns:
        Callable: Wrapped function with timing
    """

    @wraps(function)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        result = function(*args, **kwargs)
        elapsed_time = (time.perf_counter() - start_time) * 1000  # ms

        logger.debug(f"{function.__name__} executed in {elapsed_time:.2f}ms")

        return result

    return cast(F, wrapper)


class Stopwatch:
    """Context manager that records elapsed seconds.

    Example:
        with Stopwatch("epoch") as sw:
            ...
        sw.elapsed
    """

    def __init__(self, label: str = ""):
        self.label = label
        self.elapsed: float = 0.0
        self._start: Optional[float] = None

    def __enter__(self) -> "Stopwatch":
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc_info: Any) -> None:
        assert self._start is not None
        self.elapsed = time.perf_counter() - self._start
        if self.label:
            logger.debug(f"{self.label} took {self.elapsed:.3f}s")
