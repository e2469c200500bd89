import os

import numpy as np
import pytest

from modules.data import Graph, fold_directed

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


def build_graph(n, pairs, weighted=False, names=None):
    """Graph over ids 0..n-1 from (u, v[, w]) tuples"""
    arcs = [(p[0], p[1], p[2] if len(p) > 2 else 1.0) for p in pairs]
    return fold_directed(names or [str(i) for i in range(n)], arcs, weighted=weighted)


@pytest.fixture
def make_graph():
    return build_graph


@pytest.fixture
def fixture_path():
    return lambda name: os.path.join(FIXTURES, name)


@pytest.fixture
def two_triangles():
    return build_graph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])


@pytest.fixture
def triangle():
    return build_graph(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def path3():
    return build_graph(3, [(0, 1), (1, 2)], names=["a", "b", "c"])


@pytest.fixture
def star():
    # center 0, leaves 1..3
    return build_graph(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def edgeless():
    return Graph(node_names=tuple(str(i) for i in range(5)), edges=())


@pytest.fixture
def random_graph():
    """Factory for reproducible Erdős–Rényi graphs"""

    def make(n, p, seed, weighted=False, low=0.5, high=3.0):
        rng = np.random.default_rng(seed)
        pairs = []
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p:
                    pairs.append((u, v, float(rng.uniform(low, high)) if weighted else 1.0))
        return build_graph(n, pairs, weighted=weighted)

    return make
