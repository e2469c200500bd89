import io
import random

import pytest

from errors import GraphParseError, GroundTruthError, InvariantViolation
from modules.data import (Graph, fold_directed, load_graph, load_ground_truth,
                          load_ground_truth_file, parse_edge_list, parse_gml)


def test_edge_list_basic():
    g = parse_edge_list("a b\nb c")
    assert g.node_names == ("a", "b", "c")
    assert g.edges == ((0, 1, 1.0), (1, 2, 1.0))
    assert not g.is_weighted


def test_edge_list_comments_commas_and_blank_lines():
    g = parse_edge_list("# header\n\nb,c\n a , b \n")
    assert g.node_names == ("a", "b", "c")
    assert g.m == 2


def test_directed_weighted_arcs_fold():
    g = parse_edge_list("x y 2\ny x 3", directed=True, weighted=True)
    assert g.edges == ((0, 1, 5.0),)


def test_undirected_duplicates_are_summed():
    g = parse_edge_list("x y 2\nx y 0.5", weighted=True)
    assert g.edges == ((0, 1, 2.5),)


def test_unweighted_duplicates_keep_weight_one():
    g = parse_edge_list("x y\ny x\nx y 7")
    assert g.edges == ((0, 1, 1.0),)


def test_self_loop_dropped_and_counted(capsys):
    g = parse_edge_list("a a 1")
    assert g.node_names == ("a",)
    assert g.m == 0
    assert g.dropped_self_loops == 1
    assert "self-loop" in capsys.readouterr().err


def test_single_name_line_declares_isolated_node():
    g = parse_edge_list("a b\nz\n")
    assert g.node_names == ("a", "b", "z")
    assert g.neighbors(2) == ()


@pytest.mark.parametrize("text, line", [
    ("a b\nb c d e", 2),
    ("a b x", 1),
    ("a b\n\na c 0", 3),
    ("a b -1", 1),
])
def test_malformed_lines_report_line_number(text, line):
    with pytest.raises(GraphParseError) as info:
        parse_edge_list(text, weighted=True)
    assert info.value.line_number == line
    assert info.value.exit_code == 2


def test_dense_ids_ignore_line_order():
    lines = ["n%d n%d %d" % (i, (i * 7) % 13, i + 1) for i in range(1, 13)]
    first = parse_edge_list("\n".join(lines), weighted=True)
    shuffled = lines[:]
    random.Random(4).shuffle(shuffled)
    assert parse_edge_list("\n".join(shuffled), weighted=True) == first


@pytest.mark.parametrize("arcs, weight", [
    ([(0, 1, 1.0), (1, 0, 1.0)], 2.0),
    ([(0, 1, 4.0)], 4.0),
    ([(0, 1, 1.0), (0, 1, 2.0), (1, 0, 1.0)], 4.0),
])
def test_fold_directed(arcs, weight):
    g = fold_directed(["u", "v"], arcs)
    assert g.edges == ((0, 1, weight),)


def test_fold_directed_matches_brute_force_sums():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(2, 6)
        arcs = [(rng.randrange(n), rng.randrange(n), rng.choice([0.5, 1.0, 2.0, 3.25]))
                for _ in range(rng.randint(0, 15))]
        g = fold_directed([str(i) for i in range(n)], arcs)
        expected = {}
        for u, v, w in arcs:
            if u != v:
                key = (min(u, v), max(u, v))
                expected[key] = expected.get(key, 0.0) + w
        assert {(u, v): w for u, v, w in g.edges} == pytest.approx(expected)


def test_graph_rejects_broken_invariants():
    with pytest.raises(InvariantViolation):
        Graph(node_names=("a", "a"), edges=())
    with pytest.raises(InvariantViolation):
        Graph(node_names=("a", "b"), edges=((1, 0, 1.0),))
    with pytest.raises(InvariantViolation):
        Graph(node_names=("a", "b"), edges=((0, 1, 0.0),))


def test_edge_list_round_trip(random_graph):
    for seed in range(20):
        g = random_graph(9, 0.3, seed, weighted=seed % 2 == 0)
        text = g.to_edge_list()
        again = parse_edge_list(text, weighted=g.is_weighted)
        assert again.to_edge_list() == text
        assert again.n == g.n and again.m == g.m


def test_edge_list_round_trip_keeps_isolated_nodes():
    g = parse_edge_list("b c 2\nq\na\n", weighted=True)
    text = g.to_edge_list()
    assert text == "a\nq\nb c 2\n"
    assert parse_edge_list(text, weighted=True) == g


def test_unwritable_name_is_rejected():
    g = Graph(node_names=("has space", "b"), edges=((0, 1, 1.0),))
    with pytest.raises(GraphParseError):
        g.to_edge_list()


def test_minimal_gml():
    g = parse_gml("graph [ node [ id 1 ] node [ id 2 ] edge [ source 1 target 2 ] ]")
    assert g.node_names == ("1", "2")
    assert g.edges == ((0, 1, 1.0),)


def test_directed_gml_folds_opposite_arcs():
    g = parse_gml("graph [ directed 1 node [ id 0 ] node [ id 1 ] "
                  "edge [ source 0 target 1 ] edge [ source 1 target 0 ] ]", weighted=True)
    assert g.edges == ((0, 1, 2.0),)


def test_gml_file_with_values(fixture_path):
    g = load_graph(fixture_path("directed.gml"), "gml", weighted=True)
    assert g.node_names == ("1", "2", "3")
    assert g.edges == ((0, 1, 5.0), (1, 2, 1.5))
    assert g.attribute(0, "label") == "x"


def test_gml_infers_weights_when_unspecified():
    text = "graph [ node [ id 0 ] node [ id 1 ] edge [ source 0 target 1 value 3 ] ]"
    assert parse_gml(text).is_weighted
    assert not parse_gml(text, weighted=False).is_weighted
    assert parse_gml(text, weighted=False).edges == ((0, 1, 1.0),)


def test_gml_multigraph_sums_parallel_edges():
    g = parse_gml("graph [ multigraph 1 node [ id 0 ] node [ id 1 ] "
                  "edge [ source 0 target 1 value 1 ] edge [ source 1 target 0 value 2.5 ] ]")
    assert g.edges == ((0, 1, 3.5),)


@pytest.mark.parametrize("text", [
    "graph [ node [ id 0 ] node [ id 1 ] edge [ source 0 target 1 ] edge [ source 0 target 1 ] ]",
    "graph [ node [ id 0 ] node [ id 1 ] edge [ source 0 target 1 value \"x\" ] ]",
    "graph [ node [ id 0 ]",
    "graph [ node [ id 0 ] ] ]",
    "graph [ node [ label \"x\" ] ]",
    "graph [ node [ id 0 ] edge [ source 0 ] ]",
    "graph [ node [ id 0 ] edge [ source 0 target 9 ] ]",
    "graph [ node [ id 0 label \"open ] ]",
    "nothing here",
])
def test_malformed_gml(text):
    with pytest.raises(GraphParseError):
        parse_gml(text)


def test_ground_truth_stream():
    g = parse_edge_list("a b\nb c")
    truth = load_ground_truth(io.StringIO("a 0\nb 0\nc 1"), g)
    assert truth.labels == (0, 0, 1)
    assert truth.num_communities == 2


def test_ground_truth_is_dense_by_first_appearance():
    g = parse_edge_list("a b\nb c")
    assert load_ground_truth("c x\nb y\na y", g).labels == (0, 0, 1)


def test_ground_truth_unknown_and_missing_nodes():
    g = parse_edge_list("a b\nb c")
    with pytest.raises(GroundTruthError, match="zz"):
        load_ground_truth("a 0\nb 0\nc 1\nzz 2", g)
    with pytest.raises(GroundTruthError, match="c"):
        load_ground_truth("a 0\nb 0", g)


def test_ground_truth_conflicting_labels():
    g = parse_edge_list("a b")
    with pytest.raises(GroundTruthError, match="two labels"):
        load_ground_truth("a 0\na 1\nb 0", g)


def test_ground_truth_by_gml_label_and_attribute(fixture_path):
    g = load_graph(fixture_path("books.gml"), "gml")
    by_attribute = load_ground_truth_file("attr:value", g)
    assert by_attribute.labels == (0, 0, 0, 1, 1, 1)
    by_label = load_ground_truth("Alpha l\nBeta l\nGamma l\nDelta c\nEpsilon c\nZeta c", g)
    assert by_label == by_attribute


def test_ground_truth_missing_attribute(fixture_path):
    g = load_graph(fixture_path("books.gml"), "gml")
    with pytest.raises(GroundTruthError):
        load_ground_truth_file("attr:club", g)


def test_missing_graph_file(tmp_path):
    with pytest.raises(GraphParseError, match="not found"):
        load_graph(str(tmp_path / "absent.txt"))


def test_directed_flag_only_changes_status_line(capsys):
    directed = parse_edge_list("x y 2\ny x 3", directed=True, weighted=True)
    assert "Folded directed arcs into 1" in capsys.readouterr().err
    assert parse_edge_list("x y 2\ny x 3", weighted=True).edges == directed.edges


def test_non_utf8_files_are_parse_errors(tmp_path, two_triangles):
    bad = tmp_path / "bad.txt"
    bad.write_bytes(b"a b\n\xff\xfe c\n")
    with pytest.raises(GraphParseError, match="UTF-8") as info:
        load_graph(str(bad))
    assert info.value.exit_code == 2
    with pytest.raises(GraphParseError, match="UTF-8"):
        load_graph(str(bad), "gml")
    with pytest.raises(GroundTruthError, match="UTF-8"):
        load_ground_truth_file(str(bad), two_triangles)


def test_gml_round_trip_keeps_named_edges():
    nodes = " ".join(f"node [ id {i} ]" for i in range(12))
    edges = " ".join(f"edge [ source {i} target {i + 1} value {i + 1} ]" for i in range(11))
    g = parse_gml(f"graph [ {nodes} {edges} ]", weighted=True)
    back = parse_edge_list(g.to_edge_list(), weighted=True)

    def named(graph):
        return {(frozenset((graph.node_names[u], graph.node_names[v])), w)
                for u, v, w in graph.edges}

    assert named(back) == named(g)
    assert back.node_names[:4] == ("0", "1", "10", "11")
