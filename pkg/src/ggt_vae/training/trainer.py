"""
Full-batch training loop with early stopping.

Every epoch runs one forward pass over all nodes, scores the training
edges against a freshly sampled, equally sized set of non-edges, and
applies one AdamW update. Validation ROC-AUC (with ``z = mu``) drives
early stopping; the best parameters are restored before the test
partition is scored.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Set, Tuple, Union

import numpy as np

from ggt_vae.evaluation import evaluate_split
from ggt_vae.exceptions import NonFiniteError, TrainingAbortedError
from ggt_vae.graph import (
    Edge,
    EdgeSplit,
    Graph,
    TrainAdjacency,
    sample_negatives,
)
from ggt_vae.model import EncoderInputs, ModelParams, encode, init_params
from ggt_vae.numerics import AdamWState, adamw_step
from ggt_vae.spectral import laplacian_pe
from ggt_vae.utils.config import ModelConfig, TrainConfig
from ggt_vae.utils.logging import get_logger, seed_logger
from ggt_vae.utils.performance import measure_time

from .loss import compute_loss

logger = get_logger(__name__)

# Generator streams derived from a run seed; the split uses 0-2.
STREAM_INIT = 10
STREAM_TRAIN = 11

KL_TOLERANCE = 1e-9
SANITY_BAND = (0.3, 0.7)


def seeded_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream])


@dataclass
class EpochRecord:
    """Losses of one epoch, plus validation metrics when evaluated."""

    epoch: int
    recon: float
    kl: float
    val_auc: Optional[float] = None
    val_ap: Optional[float] = None


@dataclass
class RunResult:
    """Outcome of one :func:`fit` call.

    Attributes:
        seed (int): Run seed
        best_epoch (int): Epoch whose parameters were restored
        val_auc (float): Validation ROC-AUC at ``best_epoch``
        val_ap (float): Validation AP at ``best_epoch``
        test_auc (float): Test ROC-AUC with the restored parameters
        test_ap (float): Test AP with the restored parameters
        loss_curve (List[EpochRecord]): One entry per epoch run
        params (Optional[ModelParams]): Restored parameters
    """

    seed: int
    best_epoch: int
    val_auc: float
    val_ap: float
    test_auc: float
    test_ap: float
    loss_curve: List[EpochRecord] = field(default_factory=list)
    params: Optional[ModelParams] = field(
        default=None, repr=False, compare=False
    )

    @property
    def epochs_run(self) -> int:
        return len(self.loss_curve)

    def to_record(self, config: Optional[Dict[str, Any]] = None) -> dict:
        """JSON-ready run record."""
        return {
            "config": config,
            "seed": self.seed,
            "best_epoch": self.best_epoch,
            "val_auc": self.val_auc,
            "val_ap": self.val_ap,
            "test_auc": self.test_auc,
            "test_ap": self.test_ap,
            "loss_curve": [asdict(r) for r in self.loss_curve],
        }


@dataclass
class TrainingContext:
    """Everything an epoch needs besides parameters and optimizer."""

    graph: Graph
    split: EdgeSplit
    inputs: EncoderInputs
    edge_set: Set[Edge]
    excluded: Set[Edge]

    @classmethod
    def build(
        cls, graph: Graph, split: EdgeSplit, inputs: EncoderInputs
    ) -> "TrainingContext":
        return cls(
            graph=graph,
            split=split,
            inputs=inputs,
            edge_set=graph.edge_set(),
            excluded=split.negatives(),
        )


def prepare_inputs(
    graph: Graph,
    split: EdgeSplit,
    pe_dim: int,
    pe_solver: str = "jacobi",
    pe_cache_dir: Optional[Union[str, Path]] = None,
) -> Tuple[TrainAdjacency, EncoderInputs]:
    """Training adjacency and encoder inputs (PE from train edges only)."""
    adj = TrainAdjacency.from_edges(graph.n, split.train_pos)
    pe = laplacian_pe(adj, pe_dim, solver=pe_solver, cache_dir=pe_cache_dir)
    return adj, EncoderInputs.from_arrays(graph.features, pe.matrix)


def train_epoch(
    params: ModelParams,
    ctx: TrainingContext,
    optimizer: AdamWState,
    rng: np.random.Generator,
    beta: float,
    epoch: int = 0,
) -> Tuple[float, float]:
    """
    One full-batch update.

    Args:
        params: Parameters, updated in place
        ctx: Graph, split and encoder inputs
        optimizer: AdamW state, updated in place
        rng: Stream for negative sampling and latent noise
        beta: KL weight
        epoch: Epoch number for diagnostics

    Returns:
        Tuple[float, float]: ``(recon, kl)`` before the update

    Raises:
        TrainingAbortedError: The loss became NaN or infinite, or the
            KL term came out negative
    """
    train_pos = ctx.split.train_pos
    negatives = sample_negatives(
        ctx.graph,
        len(train_pos),
        exclude=ctx.excluded,
        rng=rng,
        edge_set=ctx.edge_set,
    )
    params.zero_grad()
    try:
        out = encode(ctx.inputs, params, rng=rng)
        terms = compute_loss(out, train_pos, negatives, beta)
    except NonFiniteError as e:
        logger.error(f"Epoch {epoch}: {e}")
        raise TrainingAbortedError(epoch, math.nan, math.nan) from e

    recon, kl = terms.recon.item(), terms.kl.item()
    if not (math.isfinite(recon) and math.isfinite(kl)):
        raise TrainingAbortedError(epoch, recon, kl)
    if kl < -KL_TOLERANCE:
        raise TrainingAbortedError(epoch, recon, kl, reason="Negative KL")

    terms.total.backward()
    try:
        adamw_step(params, optimizer)
    except NonFiniteError as e:
        raise TrainingAbortedError(epoch, recon, kl) from e
    return recon, kl


def _log_sanity(log: logging.LoggerAdapter, auc: float) -> None:
    low, high = SANITY_BAND
    if low <= auc <= high:
        log.debug(f"Untrained validation AUC {auc:.4f}")
    else:
        log.info(
            f"Untrained validation AUC {auc:.4f} is outside "
            f"[{low}, {high}]"
        )


@measure_time
def fit(
    graph: Graph,
    split: EdgeSplit,
    model_config: ModelConfig,
    train_config: TrainConfig,
    pe_solver: str = "jacobi",
    pe_cache_dir: Optional[Union[str, Path]] = None,
) -> RunResult:
    """
    Train one model with early stopping on validation ROC-AUC.

    Args:
        graph: Full graph (features and all edges)
        split: Edge split; only ``train_pos`` feeds the model
        model_config: Architecture
        train_config: Optimizer and stopping rules; ``seed`` fixes
            initialization, negative sampling and latent noise
        pe_solver: Eigensolver for the positional encoding
        pe_cache_dir: Optional on-disk PE cache

    Returns:
        RunResult: Metrics at the restored best epoch and the curve
    """
    seed = train_config.seed
    _, inputs = prepare_inputs(
        graph, split, model_config.pe_dim, pe_solver, pe_cache_dir
    )
    ctx = TrainingContext.build(graph, split, inputs)
    params = init_params(
        model_config, graph.d_node, seeded_rng(seed, STREAM_INIT)
    )
    optimizer = AdamWState.for_params(
        params, lr=train_config.lr, weight_decay=train_config.weight_decay
    )
    rng = seeded_rng(seed, STREAM_TRAIN)
    log = seed_logger(logger, seed)
    _log_sanity(log, evaluate_split(params, inputs, split, "val")[0])

    best_auc = -math.inf
    best_ap = 0.0
    best_epoch = 0
    best_state: Dict[str, np.ndarray] = params.state_dict()
    stale = 0
    curve: List[EpochRecord] = []

    for epoch in range(1, train_config.epochs + 1):
        recon, kl = train_epoch(
            params, ctx, optimizer, rng, train_config.beta, epoch
        )
        record = EpochRecord(epoch=epoch, recon=recon, kl=kl)
        curve.append(record)
        evaluate_now = (
            epoch % train_config.eval_every == 0
            or epoch == train_config.epochs
        )
        if evaluate_now:
            val_auc, val_ap = evaluate_split(params, inputs, split, "val")
            record.val_auc, record.val_ap = val_auc, val_ap
            if val_auc > best_auc:
                best_auc, best_ap, best_epoch = val_auc, val_ap, epoch
                best_state = params.state_dict()
                stale = 0
            else:
                stale += 1
        log.debug(
            f"epoch={epoch} recon={recon:.6f} kl={kl:.6f}"
            + (f" val_auc={record.val_auc:.4f}" if evaluate_now else "")
        )
        if stale >= train_config.patience:
            log.info(
                f"early stop at epoch {epoch} "
                f"(no improvement for {stale} evaluations)"
            )
            break

    params.load_state(best_state)
    test_auc, test_ap = evaluate_split(params, inputs, split, "test")
    log.info(
        f"best epoch {best_epoch}, val AUC {best_auc:.4f}, "
        f"test AUC {test_auc:.4f} / AP {test_ap:.4f}"
    )
    return RunResult(
        seed=seed,
        best_epoch=best_epoch,
        val_auc=best_auc,
        val_ap=best_ap,
        test_auc=test_auc,
        test_ap=test_ap,
        loss_curve=curve,
        params=params,
    )
