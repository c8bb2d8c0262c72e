"""
Exception hierarchy for GGT-VAE.

Every error carries the process exit code the command-line interface
reports for it: 2 for input/validation problems, 3 for training
failures.
"""

from typing import Optional

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_TRAINING_FAILURE = 3


class GgtVaeError(Exception):
    """Base class for all library errors."""

    exit_code: int = EXIT_INPUT_ERROR


class DimensionError(GgtVaeError, ValueError):
    """Operand shapes do not agree."""


class NonFiniteError(GgtVaeError, ArithmeticError):
    """An operation produced NaN or Inf from finite inputs."""

    def __init__(self, op: str, message: Optional[str] = None):
        self.op = op
        super().__init__(message or f"{op} produced non-finite values")


class MissingGradientError(GgtVaeError):
    """An optimizer step found a parameter without a gradient."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Parameter '{name}' has no gradient")


class GraphParseError(GgtVaeError, ValueError):
    """A graph file row could not be parsed or validated."""

    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class InsufficientDataError(GgtVaeError):
    """The graph is too small for the requested protocol."""


class InfeasibleSamplingError(GgtVaeError):
    """More negative pairs were requested than exist."""


class SelfLoopError(GgtVaeError, ValueError):
    """A node pair with u = v was passed to the decoder."""


class SplitOverlapError(GgtVaeError, ValueError):
    """Validation and test partitions share edges."""


class NotSymmetricError(GgtVaeError, ValueError):
    """A matrix expected to be symmetric is not."""


class ConvergenceError(GgtVaeError, ArithmeticError):
    """An iterative solver did not converge."""


class UndefinedMetricError(GgtVaeError, ValueError):
    """A ranking metric is undefined for the given labels."""


class CheckpointError(GgtVaeError):
    """A checkpoint file is corrupt or incompatible."""


class GraphMismatchError(GgtVaeError):
    """Artifacts were produced from different graphs."""


class ConfigError(GgtVaeError, ValueError):
    """The experiment configuration is invalid."""


class TrainingAbortedError(GgtVaeError):
    """Training hit a non-finite loss or a negative KL term."""

    exit_code = EXIT_TRAINING_FAILURE

    def __init__(
        self,
        epoch: int,
        recon: float,
        kl: float,
        reason: str = "Non-finite loss",
    ):
        self.epoch = epoch
        self.recon = recon
        self.kl = kl
        super().__init__(
            f"{reason} at epoch {epoch}: recon={recon!r}, kl={kl!r}"
        )
