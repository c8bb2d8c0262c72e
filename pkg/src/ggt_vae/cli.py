#!/usr/bin/env python3
"""
GGT-VAE command-line interface.

Reproducible link-prediction experiments with the graph-transformer
variational autoencoder. Results go to standard output, diagnostics to
standard error.

Exit codes: 0 success, 2 invalid input, 3 training aborted.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import ValidationError

from ggt_vae import __version__
from ggt_vae.analysis import (
    attention_by_distance,
    export_analysis,
    export_attention_maps,
    export_latents,
    globality,
)
from ggt_vae.analysis.export import ATTENTION_MAPS_FILE, LATENTS_FILE
from ggt_vae.evaluation import evaluate_split
from ggt_vae.exceptions import (
    EXIT_INPUT_ERROR,
    EXIT_OK,
    CheckpointError,
    ConfigError,
    GgtVaeError,
    GraphMismatchError,
)
from ggt_vae.graph import (
    EdgeSplit,
    Graph,
    load_graph,
    load_graph_dir,
    load_split,
    save_graph,
    save_split,
    split_edges,
    stochastic_block_model,
)
from ggt_vae.graph.io import EDGES_FILE, NODES_FILE
from ggt_vae.graph.split import DEFAULT_TEST_FRAC, DEFAULT_VAL_FRAC
from ggt_vae.model import ModelParams, encode, load_checkpoint
from ggt_vae.numerics import no_grad
from ggt_vae.training import load_data, multi_seed, prepare_inputs
from ggt_vae.utils.cache import configure_cache_manager
from ggt_vae.utils.config import (
    DataConfig,
    GgtVaeSettings,
    load_experiment_config,
)
from ggt_vae.utils.logging import get_log_level, get_logger, setup_logging

__all__ = ["main"]

logger = get_logger(__name__)

ABLATION_SUMMARY_FILE = "ablation_summary.csv"
ABLATION_COLUMNS = [
    "config",
    "heads",
    "layers",
    "hidden",
    "beta",
    "lr",
    "mean_auc",
    "std_auc",
    "mean_ap",
    "std_ap",
]


def create_parser() -> argparse.ArgumentParser:
    """Create command-line argument parser."""
    parser = argparse.ArgumentParser(
        prog="ggt-vae",
        description="Graph-transformer VAE for link prediction",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Make a split of a graph
  ggt-vae split --nodes data/nodes.tsv --edges data/edges.tsv --out split.json

  # Train every seed of an experiment
  ggt-vae train --config configs/base.json --out-dir runs/cora

  # Score a checkpoint on its test edges
  ggt-vae eval --checkpoint runs/cora/seed_1/checkpoint.ggt \\
      --split runs/cora/seed_1/split.json

  # Attention-versus-distance analysis
  ggt-vae analyze --checkpoint runs/cora/seed_1/checkpoint.ggt \\
      --graph data --split runs/cora/seed_1/split.json --out-dir analysis
        """,
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Enable verbose logging"
    )
    parser.add_argument(
        "--no-color", action="store_true", help="Disable colored logs"
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"ggt-vae {__version__}",
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")

    split = commands.add_parser(
        "split", help="Split edges into train/val/test"
    )
    split.add_argument("--nodes", type=Path, required=True)
    split.add_argument("--edges", type=Path, required=True)
    split.add_argument("--val-frac", type=float, default=DEFAULT_VAL_FRAC)
    split.add_argument("--test-frac", type=float, default=DEFAULT_TEST_FRAC)
    split.add_argument(
        "--eval-subsample",
        type=float,
        default=1.0,
        help="Fraction of held-out positives to score (default: 1.0)",
    )
    split.add_argument("--seed", type=int, default=0)
    split.add_argument("--out", type=Path, required=True)
    split.set_defaults(handler=cmd_split)

    train = commands.add_parser("train", help="Run a multi-seed experiment")
    train.add_argument("--config", type=Path, required=True)
    train.add_argument(
        "--out-dir",
        type=Path,
        default=None,
        help="Output directory (default: output_dir from the config)",
    )
    train.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Parallel seed processes (default: workers from the config)",
    )
    train.set_defaults(handler=cmd_train)

    evaluate = commands.add_parser("eval", help="Score a checkpoint")
    evaluate.add_argument("--checkpoint", type=Path, required=True)
    evaluate.add_argument("--split", type=Path, required=True)
    evaluate.add_argument("--which", choices=("val", "test"), default="test")
    evaluate.add_argument(
        "--graph",
        type=Path,
        default=None,
        help="Directory with nodes.tsv/edges.tsv (default: from checkpoint)",
    )
    evaluate.set_defaults(handler=cmd_eval)

    analyze = commands.add_parser(
        "analyze", help="Attention by distance, globality and latents"
    )
    analyze.add_argument("--checkpoint", type=Path, required=True)
    analyze.add_argument(
        "--graph",
        type=Path,
        default=None,
        help="Directory with nodes.tsv/edges.tsv (default: from checkpoint)",
    )
    analyze.add_argument("--split", type=Path, required=True)
    analyze.add_argument("--out-dir", type=Path, required=True)
    analyze.add_argument(
        "--exclude-self",
        action="store_true",
        help="Leave distance 0 out of the attention buckets",
    )
    analyze.set_defaults(handler=cmd_analyze)

    synth = commands.add_parser("synth", help="Write a stochastic block model")
    synth.add_argument("--blocks", type=int, default=2)
    synth.add_argument("--block-size", type=int, default=50)
    synth.add_argument("--p-in", type=float, default=0.3)
    synth.add_argument("--p-out", type=float, default=0.02)
    synth.add_argument("--feature-dim", type=int, default=8)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out-dir", type=Path, required=True)
    synth.set_defaults(handler=cmd_synth)

    ablate = commands.add_parser(
        "ablate", help="Train every config in a directory"
    )
    ablate.add_argument("--config-dir", type=Path, required=True)
    ablate.add_argument("--out-dir", type=Path, required=True)
    ablate.add_argument("--workers", type=int, default=None)
    ablate.set_defaults(handler=cmd_ablate)

    return parser


# ------------------------------------------------------------------ split


def cmd_split(args: argparse.Namespace, settings: GgtVaeSettings) -> int:
    """Write a split JSON and print its partition sizes."""
    graph = load_graph(args.nodes, args.edges)
    split = split_edges(
        graph,
        val_frac=args.val_frac,
        test_frac=args.test_frac,
        seed=args.seed,
        eval_subsample=args.eval_subsample,
    )
    save_split(split, args.out)
    print(
        f"train={len(split.train_pos)} val={len(split.val_pos)} "
        f"test={len(split.test_pos)}"
    )
    return EXIT_OK


# ------------------------------------------------------------------ train


def cmd_train(args: argparse.Namespace, settings: GgtVaeSettings) -> int:
    """Run every seed of a config and print the aggregate."""
    config = load_experiment_config(args.config)
    output_dir = args.out_dir or config.output_dir
    graph = load_data(config.data)
    result = multi_seed(
        graph,
        config,
        output_dir=output_dir,
        workers=args.workers,
        pe_cache_dir=settings.pe_cache_dir,
    )
    assert result.aggregate is not None
    print(result.aggregate.summary())
    return EXIT_OK


# ------------------------------------------------------- eval and analyze


def _checkpoint_graph(
    graph_dir: Optional[Path], header: Dict[str, Any]
) -> Graph:
    if graph_dir is not None:
        return load_graph_dir(graph_dir)
    try:
        data = DataConfig.model_validate(header["config"]["data"])
    except (KeyError, TypeError, ValidationError) as e:
        raise CheckpointError(
            f"Checkpoint does not record its data source ({e}); "
            "pass --graph"
        ) from e
    return load_data(data)


def _load_run(
    checkpoint: Path, split_path: Path, graph_dir: Optional[Path]
) -> Tuple[ModelParams, Dict[str, Any], Graph, EdgeSplit]:
    params, header = load_checkpoint(checkpoint)
    graph = _checkpoint_graph(graph_dir, header)
    split = load_split(split_path)

    expected = header.get("graph_hash", "")
    actual = graph.graph_hash()
    if expected and actual != expected:
        raise GraphMismatchError(
            f"Graph hash {actual[:12]} does not match the checkpoint "
            f"({expected[:12]})"
        )
    if split.graph_hash and split.graph_hash != actual:
        raise GraphMismatchError(
            f"Split {split_path} belongs to graph "
            f"{split.graph_hash[:12]}, not {actual[:12]}"
        )
    if graph.d_node != params.d_node:
        raise GraphMismatchError(
            f"Graph has {graph.d_node} features, checkpoint expects "
            f"{params.d_node}"
        )
    return params, header, graph, split


def _pe_solver(header: Dict[str, Any]) -> str:
    try:
        return str(header["config"]["data"]["pe_solver"])
    except (KeyError, TypeError):
        return "jacobi"


def cmd_eval(args: argparse.Namespace, settings: GgtVaeSettings) -> int:
    """Print ROC-AUC and AP of a checkpoint on one partition."""
    params, header, graph, split = _load_run(
        args.checkpoint, args.split, args.graph
    )
    _, inputs = prepare_inputs(
        graph,
        split,
        params.config.pe_dim,
        _pe_solver(header),
        settings.pe_cache_dir,
    )
    auc, ap = evaluate_split(params, inputs, split, args.which)
    print(f"{args.which} AUC {auc:.4f} / AP {ap:.4f}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace, settings: GgtVaeSettings) -> int:
    """Write the distance CSVs, attention maps and latents."""
    params, header, graph, split = _load_run(
        args.checkpoint, args.split, args.graph
    )
    adj, inputs = prepare_inputs(
        graph,
        split,
        params.config.pe_dim,
        _pe_solver(header),
        settings.pe_cache_dir,
    )
    with no_grad():
        out = encode(inputs, params, capture_attention=True)
    assert out.attention is not None

    abd = attention_by_distance(out.attention, adj, args.exclude_self)
    report = globality(abd)
    export_analysis(abd, report, args.out_dir)
    export_latents(out.mu.data, args.out_dir / LATENTS_FILE, graph.labels)
    export_attention_maps(out.attention, args.out_dir / ATTENTION_MAPS_FILE)

    print(f"diameter {report.diameter}")
    for layer, (value, norm) in enumerate(
        zip(report.layer_values, report.layer_normalized)
    ):
        print(f"layer {layer}: globality {value:.4f} (normalized {norm:.4f})")
    return EXIT_OK


# ------------------------------------------------------- synth and ablate


def cmd_synth(args: argparse.Namespace, settings: GgtVaeSettings) -> int:
    """Write nodes.tsv/edges.tsv for a stochastic block model."""
    graph = stochastic_block_model(
        [args.block_size] * args.blocks,
        args.p_in,
        args.p_out,
        feature_dim=args.feature_dim,
        seed=args.seed,
    )
    args.out_dir.mkdir(parents=True, exist_ok=True)
    save_graph(graph, args.out_dir / NODES_FILE, args.out_dir / EDGES_FILE)
    print(f"nodes={graph.n} edges={graph.num_edges}")
    return EXIT_OK


def cmd_ablate(args: argparse.Namespace, settings: GgtVaeSettings) -> int:
    """Train every ``*.json`` config of a directory and summarize."""
    paths = sorted(args.config_dir.glob("*.json"))
    if not paths:
        raise ConfigError(f"No *.json configs in {args.config_dir}")

    configs = [load_experiment_config(p) for p in paths]
    rows: List[List[Any]] = []
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for path, config in zip(paths, configs):
        logger.info(f"Ablation config {path.stem}")
        graph = load_data(config.data)
        result = multi_seed(
            graph,
            config,
            output_dir=args.out_dir / path.stem,
            workers=args.workers,
            pe_cache_dir=settings.pe_cache_dir,
        )
        agg = result.aggregate
        assert agg is not None
        rows.append(
            [
                path.stem,
                config.model.heads,
                config.model.layers,
                config.model.hidden,
                f"{config.beta:.17g}",
                f"{config.train.lr:.17g}",
                f"{agg.mean_auc:.17g}",
                f"{agg.std_auc:.17g}",
                f"{agg.mean_ap:.17g}",
                f"{agg.std_ap:.17g}",
            ]
        )
        print(f"{path.stem}: {agg.summary()}")

    summary = args.out_dir / ABLATION_SUMMARY_FILE
    with open(summary, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(ABLATION_COLUMNS)
        writer.writerows(rows)
    return EXIT_OK


# ------------------------------------------------------------------- main


def _load_settings() -> GgtVaeSettings:
    try:
        return GgtVaeSettings()
    except ValidationError as e:
        raise ConfigError(f"Invalid GGT_VAE_* settings:\n{e}") from e


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = create_parser()
    args = parser.parse_args(argv)

    try:
        settings = _load_settings()
    except ConfigError as e:
        setup_logging(use_color=not args.no_color)
        logger.error(str(e))
        return e.exit_code

    log_level = (
        logging.DEBUG if args.verbose else get_log_level(settings.log_level)
    )
    setup_logging(
        level=log_level, use_color=settings.use_color and not args.no_color
    )
    configure_cache_manager(settings.pe_cache_size)

    if args.command is None:
        parser.print_help()
        return EXIT_INPUT_ERROR

    try:
        return args.handler(args, settings)
    except GgtVaeError as e:
        logger.error(str(e))
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_INPUT_ERROR
    except ValueError as e:
        logger.error(str(e))
        return EXIT_INPUT_ERROR
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
