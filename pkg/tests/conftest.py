import numpy as np
import pytest

from gossipsim import OrientedGraph, build_network, path_graph, three_cycle


@pytest.fixture
def triangle():
    return OrientedGraph(3, ((0, 1), (0, 2), (1, 2)))


@pytest.fixture
def path3():
    return path_graph(3)


@pytest.fixture
def cycle_web():
    return three_cycle()


@pytest.fixture
def three_agent_network():
    w = np.array([
        [1 / 2, 1 / 2, 0.0],
        [1 / 3, 1 / 3, 1 / 3],
        [0.0, 1 / 2, 1 / 2],
    ])
    return build_network(w, np.array([1.0, 0.0, -1.0]))
