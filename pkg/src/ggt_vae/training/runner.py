"""
Multi-seed experiment runner.

Each seed draws its own split and trains an independent model. Per-seed
outputs are written as soon as the seed finishes::

    <output_dir>/seed_<s>/run.json         run record
    <output_dir>/seed_<s>/split.json       the edge split
    <output_dir>/seed_<s>/checkpoint.ggt   best parameters
    <output_dir>/aggregate.json            mean/std over seeds
"""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from ggt_vae.graph import Graph, load_graph, save_split, split_edges
from ggt_vae.graph.synthetic import stochastic_block_model
from ggt_vae.model import save_checkpoint
from ggt_vae.utils.config import DataConfig, ExperimentConfig
from ggt_vae.utils.logging import get_logger, seed_logger
from ggt_vae.utils.performance import Stopwatch

from .trainer import RunResult, fit

logger = get_logger(__name__)

RUN_FILE = "run.json"
SPLIT_FILE = "split.json"
CHECKPOINT_FILE = "checkpoint.ggt"
AGGREGATE_FILE = "aggregate.json"

PathLike = Union[str, Path]


@dataclass
class Aggregate:
    """Sample mean and standard deviation of test metrics over seeds."""

    mean_auc: float
    std_auc: float
    mean_ap: float
    std_ap: float
    n_seeds: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def summary(self) -> str:
        """``AUC mean ± std / AP mean ± std`` in percent."""
        return (
            f"AUC {100 * self.mean_auc:.2f} ± {100 * self.std_auc:.2f} / "
            f"AP {100 * self.mean_ap:.2f} ± {100 * self.std_ap:.2f}"
        )


@dataclass
class MultiSeedResult:
    runs: List[RunResult] = field(default_factory=list)
    aggregate: Optional[Aggregate] = None


def _sample_std(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1)) if values.size > 1 else 0.0


def aggregate_runs(runs: Sequence[RunResult]) -> Aggregate:
    """
    Aggregate test metrics.

    A single run has no sample standard deviation; it is reported as 0
    with a warning.
    """
    if not runs:
        raise ValueError("No runs to aggregate")
    auc = np.array([r.test_auc for r in runs])
    ap = np.array([r.test_ap for r in runs])
    if len(runs) < 2:
        logger.warning("Only one seed; standard deviation reported as 0")
    return Aggregate(
        mean_auc=float(np.mean(auc)),
        std_auc=_sample_std(auc),
        mean_ap=float(np.mean(ap)),
        std_ap=_sample_std(ap),
        n_seeds=len(runs),
    )


def load_data(data: DataConfig) -> Graph:
    """Load the graph named by a data config (files or synthetic SBM)."""
    if data.synthetic is not None:
        s = data.synthetic
        return stochastic_block_model(
            [s.block_size] * s.blocks,
            s.p_in,
            s.p_out,
            feature_dim=s.feature_dim,
            seed=s.seed,
        )
    assert data.nodes is not None and data.edges is not None
    return load_graph(data.nodes, data.edges)


def write_json(path: PathLike, doc: Any) -> None:
    """Deterministic JSON (sorted keys, 2-space indent, trailing newline)."""
    text = json.dumps(doc, sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def seed_dir(output_dir: PathLike, seed: int) -> Path:
    return Path(output_dir) / f"seed_{seed}"


def run_seed(
    graph: Graph,
    config: ExperimentConfig,
    seed: int,
    output_dir: Optional[PathLike] = None,
    pe_cache_dir: Optional[PathLike] = None,
) -> RunResult:
    """
    Split, train and (optionally) persist one seed.

    Args:
        graph: Dataset
        config: Experiment config; ``train.seed`` is replaced by ``seed``
        seed: Seed for the split and the run
        output_dir: Where per-seed outputs go; nothing is written if None
        pe_cache_dir: Optional on-disk positional-encoding cache

    Returns:
        RunResult: Result including the restored parameters
    """
    data = config.data
    split = split_edges(
        graph,
        val_frac=data.val_frac,
        test_frac=data.test_frac,
        seed=seed,
        eval_subsample=data.eval_subsample,
    )
    train_config = config.train.model_copy(update={"seed": seed})
    log = seed_logger(logger, seed)
    with Stopwatch() as watch:
        result = fit(
            graph,
            split,
            config.model,
            train_config,
            pe_solver=data.pe_solver,
            pe_cache_dir=pe_cache_dir,
        )
    log.info(
        f"{result.epochs_run} epochs in {watch.elapsed:.1f}s, "
        f"test AUC {result.test_auc:.4f}"
    )

    if output_dir is not None:
        out = seed_dir(output_dir, seed)
        out.mkdir(parents=True, exist_ok=True)
        config_doc = config.to_json_dict()
        save_split(split, out / SPLIT_FILE)
        assert result.params is not None
        save_checkpoint(
            out / CHECKPOINT_FILE,
            result.params,
            {
                "config": config_doc,
                "epoch": result.best_epoch,
                "seed": seed,
                "graph_hash": split.graph_hash,
                "metrics": {
                    "val_auc": result.val_auc,
                    "val_ap": result.val_ap,
                    "test_auc": result.test_auc,
                    "test_ap": result.test_ap,
                },
            },
        )
        write_json(out / RUN_FILE, result.to_record(config_doc))
        log.info(f"outputs written to {out}")
    return result


def _run_seed_worker(
    graph: Graph,
    config: ExperimentConfig,
    seed: int,
    output_dir: Optional[PathLike],
    pe_cache_dir: Optional[PathLike],
) -> RunResult:
    result = run_seed(graph, config, seed, output_dir, pe_cache_dir)
    result.params = None
    return result


def multi_seed(
    graph: Graph,
    config: ExperimentConfig,
    seeds: Optional[Sequence[int]] = None,
    output_dir: Optional[PathLike] = None,
    workers: Optional[int] = None,
    pe_cache_dir: Optional[PathLike] = None,
) -> MultiSeedResult:
    """
    Run independent seeds and aggregate their test metrics.

    Args:
        graph: Dataset
        config: Experiment config
        seeds: Seeds to run (default ``config.seeds``)
        output_dir: Output root; also receives ``aggregate.json``
        workers: Parallel processes (default ``config.workers``)
        pe_cache_dir: Optional on-disk positional-encoding cache

    Returns:
        MultiSeedResult: Runs in the given seed order plus the aggregate

    Raises:
        GgtVaeError: The first failing seed's error; records of seeds
            that already finished stay on disk
    """
    seeds = list(config.seeds if seeds is None else seeds)
    workers = config.workers if workers is None else workers
    if output_dir is not None:
        Path(output_dir).mkdir(parents=True, exist_ok=True)

    runs: List[RunResult] = []
    if workers <= 1 or len(seeds) == 1:
        for seed in seeds:
            runs.append(
                run_seed(graph, config, seed, output_dir, pe_cache_dir)
            )
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _run_seed_worker,
                    graph,
                    config,
                    seed,
                    output_dir,
                    pe_cache_dir,
                )
                for seed in seeds
            ]
            try:
                runs = [f.result() for f in futures]
            except BaseException:
                for f in futures:
                    f.cancel()
                raise

    agg = aggregate_runs(runs)
    if output_dir is not None:
        write_json(Path(output_dir) / AGGREGATE_FILE, agg.to_dict())
    logger.info(f"{agg.n_seeds} seeds: {agg.summary()}")
    return MultiSeedResult(runs=runs, aggregate=agg)
