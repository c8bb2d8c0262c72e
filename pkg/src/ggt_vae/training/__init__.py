"""Loss, training loop and the multi-seed runner."""

from .loss import LossTerms, compute_loss, kl_divergence, reconstruction_loss
from .runner import (
    Aggregate,
    MultiSeedResult,
    aggregate_runs,
    load_data,
    multi_seed,
    run_seed,
)
from .trainer import (
    EpochRecord,
    RunResult,
    TrainingContext,
    fit,
    prepare_inputs,
    seeded_rng,
    train_epoch,
)

__all__ = [
    "Aggregate",
    "EpochRecord",
    "LossTerms",
    "MultiSeedResult",
    "RunResult",
    "TrainingContext",
    "aggregate_runs",
    "compute_loss",
    "fit",
    "kl_divergence",
    "load_data",
    "multi_seed",
    "prepare_inputs",
    "reconstruction_loss",
    "run_seed",
    "seeded_rng",
    "train_epoch",
]
