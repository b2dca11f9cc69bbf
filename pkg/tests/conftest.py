import numpy as np
import pytest

from qtransfer.graphs import Graph


@pytest.fixture
def triangle():
    return Graph(3, ((0, 1), (1, 2), (0, 2)))


@pytest.fixture
def k4():
    return Graph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))


@pytest.fixture
def path3():
    return Graph(3, ((0, 1), (1, 2)))


@pytest.fixture
def star4():
    # K_{1,3}: center 0
    return Graph(4, ((0, 1), (0, 2), (0, 3)))


@pytest.fixture
def c6():
    return Graph(6, tuple((i, (i + 1) % 6) for i in range(6)))


@pytest.fixture
def single_edge():
    return Graph(2, ((0, 1),))


def random_simple_graph(n: int, p_edge: float, rng: np.random.Generator) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p_edge]
    if not edges:
        edges = [(0, 1)]
    return Graph(n, tuple(edges))
