"""
Pytest configuration and fixtures for GGT-VAE.

This module provides small graphs, configs and parameter sets shared by
the unit and integration tests.
"""

import numpy as np
import pytest

from ggt_vae.graph import Graph, TrainAdjacency, stochastic_block_model
from ggt_vae.model import init_params
from ggt_vae.utils.cache import configure_cache_manager
from ggt_vae.utils.config import (
    DataConfig,
    ExperimentConfig,
    ModelConfig,
    SyntheticConfig,
    TrainConfig,
)


@pytest.fixture(autouse=True)
def fresh_cache():
    """
    Give every test an empty positional-encoding cache.

    Returns:
        CacheManager: The cache used during the test
    """
    return configure_cache_manager(32)


@pytest.fixture
def path3_adjacency():
    """
    Path graph 0 - 1 - 2.

    Returns:
        TrainAdjacency: Three nodes, two edges
    """
    return TrainAdjacency.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def cycle_graph():
    """
    Twelve-node ring with two chords and random features.

    Returns:
        Graph: 14 edges, 4 features
    """
    n = 12
    edges = [(i, (i + 1) % n) for i in range(n)] + [(0, 6), (3, 9)]
    features = np.random.default_rng(7).standard_normal((n, 4))
    return Graph(n=n, features=features, edges=edges)


@pytest.fixture
def sbm_graph():
    """
    Two-block stochastic block model with 40 nodes.

    Returns:
        Graph: Labelled SBM graph
    """
    return stochastic_block_model([20, 20], 0.4, 0.05, feature_dim=4, seed=3)


@pytest.fixture
def tiny_model_config():
    """
    Small architecture used by the gradient checks.

    Returns:
        ModelConfig: L=2, H=2, hidden 16, latent 4, PE width 3
    """
    return ModelConfig(layers=2, heads=2, hidden=16, latent=4, pe_dim=3)


@pytest.fixture
def tiny_params(tiny_model_config):
    """
    Initialized parameters for ``tiny_model_config`` with 4 input features.

    Returns:
        ModelParams: Freshly initialized parameters
    """
    return init_params(tiny_model_config, 4, np.random.default_rng(0))


@pytest.fixture
def fast_experiment_config(tmp_path):
    """
    Few-epoch experiment on a synthetic graph.

    Returns:
        ExperimentConfig: Two seeds, outputs under ``tmp_path``
    """
    return ExperimentConfig(
        model=ModelConfig(layers=1, heads=2, hidden=8, latent=4, pe_dim=4),
        train=TrainConfig(epochs=5, patience=3),
        data=DataConfig(
            synthetic=SyntheticConfig(
                blocks=2, block_size=15, p_in=0.4, p_out=0.05, feature_dim=4
            ),
            pe_solver="numpy",
        ),
        seeds=[1, 2],
        output_dir=tmp_path / "runs",
    )
