import numpy as np
import pytest

from netspectra import WeightedGraph, make_rng
from netspectra.generators import GenConfig, WeightDistribution, generate_connected

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def complete_graph(n):
    i, j = np.triu_indices(n, 1)
    return WeightedGraph(n, i, j)


@pytest.fixture
def k3():
    return complete_graph(3)


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def star4():
    return WeightedGraph(5, [0, 0, 0, 0], [1, 2, 3, 4])


@pytest.fixture
def wpath():
    """Path 0-1-2 with weights 1 and 4."""
    return WeightedGraph(3, [0, 1], [1, 2], [1.0, 4.0])


def random_graph(seed, model="er", n=50, k_ave=8, weights="uniform", q=0.5):
    rng = make_rng(seed)
    g, _ = generate_connected(GenConfig(model=model, n=n, k_ave=k_ave, q=q, seed=seed),
                              WeightDistribution(weights, 1.0), rng)
    return g
