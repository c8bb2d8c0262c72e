"""
Logging for GGT-VAE.

Results are printed to standard output by the CLI; everything logged
here goes to standard error. Per-seed messages carry a ``[seed N]``
prefix through :class:`SeedLoggerAdapter` so interleaved output from
parallel seeds stays readable.
"""

import logging
import sys
from typing import Any, MutableMapping, Optional, TextIO, Tuple

import colorlog

LOG_FORMAT = (
    "%(log_color)s%(levelname)-8s%(reset)s "
    "%(blue)s%(name)s%(reset)s "
    "%(message)s%(reset)s"
)

DEFAULT_LOG_LEVEL = logging.INFO

LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "red,bg_white",
}

LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}

COLOR_TOKENS = ("%(log_color)s", "%(reset)s", "%(blue)s")


def _formatter(use_color: bool, log_format: str) -> logging.Formatter:
    if use_color:
        return colorlog.ColoredFormatter(
            log_format, log_colors=LOG_COLORS, reset=True, style="%"
        )
    for token in COLOR_TOKENS:
        log_format = log_format.replace(token, "")
    return logging.Formatter(log_format, style="%")


def setup_logging(
    level: int = DEFAULT_LOG_LEVEL,
    log_format: Optional[str] = None,
    use_color: bool = True,
    stream: Optional[TextIO] = None,
) -> None:
    """Install one stderr handler on the root logger.

    A second call keeps the existing handler and only changes the level,
    so library code and the CLI can both call it.

    Args:
        level: Logging level (default: INFO)
        log_format: Custom format string; color tokens are stripped when
            ``use_color`` is off
        use_color: Colorize level names and logger names
        stream: Target stream (default: ``sys.stderr``)
    """
    root = logging.getLogger()
    root.setLevel(level)
    if root.handlers:
        return

    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(_formatter(use_color, log_format or LOG_FORMAT))
    root.addHandler(handler)


def get_logger(name: str) -> logging.Logger:
    """Module logger; pass ``__name__``."""
    return logging.getLogger(name)


class SeedLoggerAdapter(logging.LoggerAdapter):
    """Prefix every message with the seed of the run that logged it."""

    def process(
        self, msg: Any, kwargs: MutableMapping[str, Any]
    ) -> Tuple[Any, MutableMapping[str, Any]]:
        extra = self.extra or {}
        return f"[seed {extra.get('seed')}] {msg}", kwargs


def seed_logger(logger: logging.Logger, seed: int) -> SeedLoggerAdapter:
    """Wrap ``logger`` so its messages name ``seed``."""
    return SeedLoggerAdapter(logger, {"seed": seed})


def set_log_level(level: int) -> None:
    logging.getLogger().setLevel(level)


def get_log_level(level_str: str) -> int:
    """Map a level name (any case) to its ``logging`` constant.

    Raises:
        ValueError: Unknown level name
    """
    try:
        return LEVELS[level_str.upper()]
    except KeyError:
        raise ValueError(
            f"Invalid log level: {level_str}. "
            f"Valid levels: {', '.join(LEVELS)}"
        ) from None
