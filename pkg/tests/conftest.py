"""Store the classes and fixtures used throughout the tests."""

from pathlib import Path
from shutil import copyfile

import numpy as np
import pytest

from maxdiff.config import Config
from maxdiff.distance import ConnectivityGraph
from maxdiff.model import PooledSample, TestConfig, validate_sample

# Pairs connected in the six observation graph whose groups have the same
# connection frequency within and between them.
BALANCED_EDGES = [(0, 1), (3, 4), (0, 3), (1, 4), (2, 5)]


@pytest.fixture(name="config")
def fixture_config(tmp_path: Path) -> Config:
    """Configure the Config object for the tests."""
    data = tmp_path / "data"
    data.mkdir()
    config_file = data / "config.yaml"
    copyfile("tests/assets/config.yaml", config_file)
    config = Config(str(config_file))

    return config


@pytest.fixture(name="toy")
def toy_() -> PooledSample:
    """Prepare two well separated clusters of two one dimensional points."""
    return validate_sample([0.0, 0.5, 10.0, 10.4], [1, 1, 2, 2])


@pytest.fixture(name="balanced")
def balanced_() -> PooledSample:
    """Prepare the six observations of the balanced graph."""
    return validate_sample(np.arange(6.0), [1, 1, 1, 2, 2, 2])


@pytest.fixture(name="balanced_graph")
def balanced_graph_() -> ConnectivityGraph:
    """Prepare a graph with equal connection frequencies within and between groups."""
    adjacency = np.zeros((6, 6))
    for first, second in BALANCED_EDGES:
        adjacency[first, second] = adjacency[second, first] = 1
    return ConnectivityGraph(adjacency=adjacency, tau=1.0)


@pytest.fixture(name="null_sample")
def null_sample_() -> PooledSample:
    """Prepare two groups of 20 and 40 observations of the same normal law."""
    rng = np.random.default_rng(42)
    return validate_sample(rng.standard_normal((10, 60)), [1] * 20 + [2] * 40)


@pytest.fixture(name="shifted_sample")
def shifted_sample_() -> PooledSample:
    """Prepare two groups whose means differ by a large shift."""
    rng = np.random.default_rng(7)
    data = rng.standard_normal((10, 60))
    data[:, 30:] += 3
    return validate_sample(data, ["a"] * 30 + ["b"] * 30)


@pytest.fixture(name="test_config")
def test_config_() -> TestConfig:
    """Prepare a cheap calibration configuration."""
    return TestConfig(mc_outer=20, mc_inner=100, seed=3)
