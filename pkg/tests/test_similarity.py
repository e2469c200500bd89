import numpy as np
import pytest

from errors import ParameterError
from modules.similarity import (SimilarityMatrix, distance_from_similarity, similarity_for,
                                similarity_to_csv, similarity_unweighted, similarity_weighted)
from modules.data import Graph, parse_edge_list


def test_triangle_common_neighbours(triangle):
    s = similarity_unweighted(triangle)
    assert s.values[0, 1] == 1
    assert np.all(np.diag(s.values) == 0)


def test_adjacent_nodes_without_common_neighbour(path3):
    s = similarity_unweighted(path3)
    assert s.values[0, 2] == 1
    assert s.values[0, 1] == 0
    assert s.values[1, 2] == 0


def test_star_leaves_share_the_center(star):
    s = similarity_unweighted(star)
    assert s.values[1, 2] == s.values[2, 3] == 1
    assert all(s.values[0, leaf] == 0 for leaf in (1, 2, 3))


def test_weighted_passthrough():
    g = Graph(node_names=("u", "v", "w"), edges=((0, 1, 5.0),), is_weighted=True)
    s = similarity_weighted(g)
    expected = np.zeros((3, 3))
    expected[0, 1] = expected[1, 0] = 5.0
    assert np.array_equal(s.values, expected)


def test_weighted_edgeless_is_zero(edgeless):
    assert not similarity_weighted(edgeless).values.any()


def test_folded_pair_weight():
    g = parse_edge_list("x y 2\ny x 3", directed=True, weighted=True)
    assert similarity_for(g).values[0, 1] == 5.0


def test_similarity_for_dispatches_on_weighting(triangle):
    weighted = Graph(node_names=triangle.node_names, edges=triangle.edges, is_weighted=True)
    assert similarity_for(triangle).values[0, 1] == 1.0
    assert similarity_for(weighted).values[0, 1] == 1.0
    assert similarity_for(Graph(node_names=("a", "b"), edges=((0, 1, 1.0),))).values[0, 1] == 0.0


def test_matrices_are_read_only(triangle):
    s = similarity_unweighted(triangle)
    with pytest.raises(ValueError):
        s.values[0, 1] = 3.0


def test_reciprocal_transform():
    s = SimilarityMatrix(values=np.array([[0.0, 1.0], [1.0, 0.0]]))
    d = distance_from_similarity(s, "reciprocal")
    assert d.values[0, 1] == 0.5
    assert d.values[0, 0] == 0.0


def test_max_minus_transform():
    values = np.array([[0.0, 4.0, 0.0], [4.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    d = distance_from_similarity(SimilarityMatrix(values=values), "max_minus")
    assert d.values[0, 2] == 4.0
    assert d.values[0, 1] == 0.0
    assert d.values[1, 2] == 3.0


def test_transform_errors():
    with pytest.raises(ParameterError):
        distance_from_similarity(SimilarityMatrix(values=np.zeros((0, 0))))
    with pytest.raises(ParameterError):
        distance_from_similarity(SimilarityMatrix(values=np.zeros((2, 2))), "log")


@pytest.mark.parametrize("transform", ["reciprocal", "max_minus"])
def test_transforms_are_strictly_decreasing(transform, random_graph):
    g = random_graph(10, 0.5, 3)
    s = similarity_unweighted(g).values
    d = distance_from_similarity(similarity_unweighted(g), transform).values
    off = ~np.eye(g.n, dtype=bool)
    sims, dists = s[off], d[off]
    for a in range(sims.size):
        for b in range(sims.size):
            if sims[a] > sims[b]:
                assert dists[a] < dists[b]
    assert np.array_equal(d, d.T)
    assert (d >= 0).all()


def test_similarity_csv_dump(triangle):
    assert similarity_to_csv(similarity_unweighted(triangle)) == "0,1,1\n1,0,1\n1,1,0\n"


@pytest.mark.slow
def test_common_neighbour_oracle(random_graph):
    rng = np.random.default_rng(0)
    for seed in range(1000):
        n = int(rng.integers(1, 13))
        g = random_graph(n, float(rng.uniform(0.1, 0.9)), seed)
        neighbours = [set(g.neighbors(i)) for i in range(n)]
        s = similarity_unweighted(g).values
        for i in range(n):
            for j in range(n):
                expected = 0 if i == j else len(neighbours[i] & neighbours[j])
                assert abs(s[i, j] - expected) <= 1e-10
        assert np.array_equal(s, s.T)


@pytest.mark.slow
def test_weighted_support_matches_adjacency(random_graph):
    for seed in range(200):
        g = random_graph(10, 0.4, seed, weighted=True)
        support = similarity_weighted(g).values > 0
        expected = np.zeros((g.n, g.n), dtype=bool)
        for u, v, _ in g.edges:
            expected[u, v] = expected[v, u] = True
        assert np.array_equal(support, expected)
