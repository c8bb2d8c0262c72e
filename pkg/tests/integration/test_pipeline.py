"""
Integration tests for the synth -> train -> eval -> analyze workflow.
"""

import csv
import json

import numpy as np
import pytest

from ggt_vae.cli import main
from ggt_vae.exceptions import EXIT_INPUT_ERROR, EXIT_OK


def _experiment(out_dir, graph_dir):
    return {
        "model": {
            "layers": 2,
            "heads": 2,
            "hidden": 16,
            "latent": 8,
            "pe_dim": 4,
            "beta": 0.0005,
        },
        "train": {"epochs": 15, "lr": 0.005, "patience": 10},
        "data": {
            "nodes": str(graph_dir / "nodes.tsv"),
            "edges": str(graph_dir / "edges.tsv"),
        },
        "seeds": [1, 2],
        "output_dir": str(out_dir),
    }


@pytest.fixture
def workspace(monkeypatch, tmp_path):
    """
    Directory holding a synthetic graph and an experiment config.

    Returns:
        Path: Working directory with ``graph/`` and ``exp.json``
    """
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("GGT_VAE_USE_COLOR", "false")
    assert main(
        ["synth", "--out-dir", "graph", "--block-size", "20", "--seed", "1"]
    ) == EXIT_OK
    config = _experiment(tmp_path / "runs", tmp_path / "graph")
    (tmp_path / "exp.json").write_text(json.dumps(config), encoding="utf-8")
    return tmp_path


def test_train_is_reproducible(workspace, capsys):
    """Test two trainings write byte-identical aggregates."""
    assert main(["train", "--config", "exp.json", "--out-dir", "a"]) == 0
    first_out = capsys.readouterr().out
    assert main(["train", "--config", "exp.json", "--out-dir", "b"]) == 0
    second_out = capsys.readouterr().out

    assert first_out == second_out
    assert first_out.startswith("AUC ")
    assert (workspace / "a" / "aggregate.json").read_bytes() == (
        workspace / "b" / "aggregate.json"
    ).read_bytes()
    assert (workspace / "a" / "seed_1" / "run.json").read_bytes() == (
        workspace / "b" / "seed_1" / "run.json"
    ).read_bytes()


def test_eval_reproduces_recorded_metrics(workspace, capsys):
    """Test eval on a saved checkpoint prints the recorded test AUC."""
    assert main(["train", "--config", "exp.json"]) == EXIT_OK
    run_dir = workspace / "runs" / "seed_2"
    record = json.loads((run_dir / "run.json").read_text("utf-8"))
    capsys.readouterr()

    code = main(
        [
            "eval",
            "--checkpoint", str(run_dir / "checkpoint.ggt"),
            "--split", str(run_dir / "split.json"),
        ]
    )

    assert code == EXIT_OK
    out = capsys.readouterr().out.strip()
    assert out == (
        f"test AUC {record['test_auc']:.4f} / AP {record['test_ap']:.4f}"
    )


def test_analyze_writes_outputs(workspace, capsys):
    """Test analyze writes the CSVs and the attention maps."""
    assert main(["train", "--config", "exp.json"]) == EXIT_OK
    run_dir = workspace / "runs" / "seed_1"
    capsys.readouterr()

    code = main(
        [
            "analyze",
            "--checkpoint", str(run_dir / "checkpoint.ggt"),
            "--split", str(run_dir / "split.json"),
            "--graph", "graph",
            "--out-dir", "analysis",
        ]
    )

    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("diameter ")
    assert len(lines) == 3

    with open(workspace / "analysis" / "attention_by_spd.csv") as f:
        rows = list(csv.DictReader(f))
    far = [r for r in rows if int(r["spd"]) >= 3]
    assert far, "training graph should have pairs three hops apart"
    n = 40
    assert all(float(r["mean_attention"]) > 1.0 / n**2 for r in far)

    with open(workspace / "analysis" / "globality.csv") as f:
        globality_rows = list(csv.DictReader(f))
    assert len(globality_rows) == 2 * 3
    assert all(
        0.0 <= float(r["normalized_globality"]) <= 1.0
        for r in globality_rows
    )
    assert (workspace / "analysis" / "latents.csv").exists()
    with np.load(workspace / "analysis" / "attention_maps.npz") as maps:
        assert len(maps.files) == 2 * 2
        np.testing.assert_allclose(
            maps["layer1_head0"].sum(axis=1), 1.0, atol=1e-9
        )
        assert maps["layer0_head1"].shape == (n, n)


def test_eval_rejects_other_graph(workspace):
    """Test a checkpoint cannot be scored against a different graph."""
    assert main(["train", "--config", "exp.json"]) == EXIT_OK
    assert main(
        ["synth", "--out-dir", "other", "--block-size", "20", "--seed", "9"]
    ) == EXIT_OK
    run_dir = workspace / "runs" / "seed_1"

    code = main(
        [
            "eval",
            "--checkpoint", str(run_dir / "checkpoint.ggt"),
            "--split", str(run_dir / "split.json"),
            "--graph", "other",
        ]
    )

    assert code == EXIT_INPUT_ERROR


def test_eval_rejects_split_that_is_not_an_object(workspace):
    """Test a non-object split file exits with the input-error code."""
    assert main(["train", "--config", "exp.json"]) == EXIT_OK
    run_dir = workspace / "runs" / "seed_1"
    (workspace / "bad_split.json").write_text("5\n", encoding="utf-8")

    code = main(
        [
            "eval",
            "--checkpoint", str(run_dir / "checkpoint.ggt"),
            "--split", "bad_split.json",
            "--graph", "graph",
        ]
    )

    assert code == EXIT_INPUT_ERROR


def test_ablate_summary(workspace, capsys):
    """Test ablate trains each config and writes a summary row per file."""
    config_dir = workspace / "ablations"
    config_dir.mkdir()
    for heads in (1, 2):
        doc = _experiment(workspace / "unused", workspace / "graph")
        doc["model"]["heads"] = heads
        doc["train"]["epochs"] = 3
        doc["seeds"] = [1]
        (config_dir / f"H-{heads}.json").write_text(
            json.dumps(doc), encoding="utf-8"
        )

    code = main(["ablate", "--config-dir", "ablations", "--out-dir", "abl"])

    assert code == EXIT_OK
    with open(workspace / "abl" / "ablation_summary.csv") as f:
        rows = list(csv.DictReader(f))
    assert [r["config"] for r in rows] == ["H-1", "H-2"]
    assert [r["heads"] for r in rows] == ["1", "2"]
    assert (workspace / "abl" / "H-2" / "aggregate.json").exists()
