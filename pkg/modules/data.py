"""
Graph data loading

Parses edge lists and GML files into undirected graphs over dense node ids,
folds directed arcs into undirected edges and loads ground-truth labels.
"""

import math
import os
import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import networkx as nx
import numpy as np

from errors import GraphParseError, GroundTruthError, InvariantViolation
from modules import console

Edge = Tuple[int, int, float]
Source = Union[str, TextIO]

FIELD_SEPARATOR = re.compile(r"[,\s]+")


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph over dense node ids 0..n-1"""

    node_names: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    is_weighted: bool = False
    node_attributes: Tuple[Dict[str, object], ...] = field(default=(), compare=False)
    dropped_self_loops: int = field(default=0, compare=False)

    def __post_init__(self):
        n = len(self.node_names)
        if len(set(self.node_names)) != n:
            raise InvariantViolation("node names must be unique")
        seen = set()
        for u, v, w in self.edges:
            if not (0 <= u < v < n):
                raise InvariantViolation(f"edge ({u}, {v}) is not a valid u < v pair")
            if (u, v) in seen:
                raise InvariantViolation(f"edge ({u}, {v}) appears twice")
            if not w > 0:
                raise InvariantViolation(f"edge ({u}, {v}) has non-positive weight {w}")
            seen.add((u, v))

    @property
    def n(self) -> int:
        return len(self.node_names)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> float:
        return math.fsum(w for _, _, w in self.edges)

    @cached_property
    def index(self) -> Dict[str, int]:
        """Node name -> dense id"""
        return {name: i for i, name in enumerate(self.node_names)}

    @cached_property
    def _neighbor_lists(self) -> Tuple[Tuple[int, ...], ...]:
        adjacency = [[] for _ in range(self.n)]
        for u, v, _ in self.edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        return tuple(tuple(sorted(nbrs)) for nbrs in adjacency)

    def neighbors(self, i: int) -> Tuple[int, ...]:
        """N(i): nodes connected to i, ascending"""
        return self._neighbor_lists[i]

    def adjacency_matrix(self, binary: bool = False) -> np.ndarray:
        """Dense symmetric matrix of edge weights (or 0/1 when binary)"""
        a = np.zeros((self.n, self.n), dtype=float)
        for u, v, w in self.edges:
            a[u, v] = a[v, u] = 1.0 if binary else w
        return a

    def attribute(self, i: int, name: str):
        if i < len(self.node_attributes):
            return self.node_attributes[i].get(name)
        return None

    def to_edge_list(self) -> str:
        """
        Canonical edge list: isolated nodes as single-name lines, then one
        "u v w" line per edge, everything in lexicographic name order

        Parsing the result back gives the same named edge set. Dense ids are
        reassigned lexicographically, so a GML graph with ids 0..10 comes
        back ordered "0", "1", "10", "2", ...
        """
        for name in self.node_names:
            if name == "" or FIELD_SEPARATOR.search(name) or name.startswith("#"):
                raise GraphParseError(f"node name {name!r} cannot be written to an edge list")

        names = self.node_names
        degree = [0] * self.n
        lines = []
        for u, v, w in self.edges:
            degree[u] += 1
            degree[v] += 1
            a, b = sorted((names[u], names[v]))
            lines.append((a, b, w))

        isolated = sorted(name for i, name in enumerate(names) if degree[i] == 0)
        out = [f"{name}\n" for name in isolated]
        out += [f"{a} {b} {format_weight(w)}\n" for a, b, w in sorted(lines)]
        return "".join(out)


@dataclass(frozen=True)
class GroundTruth:
    """Ground-truth community per dense node id"""

    labels: Tuple[int, ...]
    names: Tuple[str, ...] = field(default=(), compare=False)

    @property
    def num_communities(self) -> int:
        return len(set(self.labels))


def format_weight(w: float) -> str:
    if float(w).is_integer():
        return str(int(w))
    return repr(float(w))


def _read(source: Source) -> str:
    if hasattr(source, "read"):
        return source.read()
    return source


def fold_directed(node_names: Sequence[str], arcs: Iterable[Edge],
                  weighted: bool = True,
                  node_attributes: Sequence[Dict[str, object]] = ()) -> Graph:
    """
    Fold a directed edge multiset into an undirected graph

    Every unordered pair keeps one edge whose weight is the sum of all arcs
    between its endpoints, in either direction. Unweighted graphs keep
    weight 1 per pair. Self-loops are dropped.

    Args:
        node_names: Names indexed by dense id
        arcs: (source id, target id, weight) triples, repeats allowed
        weighted: Keep summed weights (False forces every pair to 1)

    Returns:
        Graph
    """
    totals: Dict[Tuple[int, int], List[float]] = defaultdict(list)
    dropped = 0
    for u, v, w in arcs:
        if u == v:
            dropped += 1
            continue
        if not w > 0:
            raise GraphParseError(f"arc ({u}, {v}) has non-positive weight {w}")
        totals[(min(u, v), max(u, v))].append(w)

    # fsum keeps the folded weight independent of arc order
    edges = tuple(
        (u, v, math.fsum(ws) if weighted else 1.0)
        for (u, v), ws in sorted(totals.items())
    )
    return Graph(
        node_names=tuple(node_names),
        edges=edges,
        is_weighted=weighted,
        node_attributes=tuple(node_attributes),
        dropped_self_loops=dropped,
    )


def parse_edge_list(source: Source, directed: bool = False, weighted: bool = False) -> Graph:
    """
    Parse "src dst [weight]" lines (whitespace or comma separated)

    '#' lines are comments and a line holding a single name declares an
    isolated node. Dense ids follow the lexicographic order of all names,
    so the result does not depend on line order. Opposite arcs and
    undirected duplicates fold the same way, so directed only changes
    the status line.
    """
    names = set()
    raw_arcs = []
    self_loops = 0

    for line_number, raw in enumerate(_read(source).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f for f in FIELD_SEPARATOR.split(line) if f]
        if len(fields) == 1:
            names.add(fields[0])
            continue
        if len(fields) not in (2, 3):
            raise GraphParseError(
                f"expected 'src dst [weight]', found {len(fields)} fields", line_number
            )

        weight = 1.0
        if len(fields) == 3:
            try:
                weight = float(fields[2])
            except ValueError:
                raise GraphParseError(f"non-numeric weight {fields[2]!r}", line_number)
            if not math.isfinite(weight) or weight <= 0:
                raise GraphParseError(f"weight must be positive, got {fields[2]}", line_number)

        src, dst = fields[0], fields[1]
        names.update((src, dst))
        if src == dst:
            self_loops += 1
            continue
        raw_arcs.append((src, dst, weight))

    node_names = sorted(names)
    index = {name: i for i, name in enumerate(node_names)}
    # undirected duplicates are summed exactly like opposite arcs
    graph = fold_directed(
        node_names,
        ((index[s], index[d], w) for s, d, w in raw_arcs),
        weighted=weighted,
    )
    if self_loops:
        console.warn(f"Dropped {self_loops} self-loop line(s)")
    if directed:
        console.info(f"Folded directed arcs into {graph.m} undirected edges")
    return Graph(
        node_names=graph.node_names,
        edges=graph.edges,
        is_weighted=weighted,
        dropped_self_loops=self_loops,
    )


# -----------------------
# GML
# -----------------------

def _gml_int(value, what: str) -> int:
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if isinstance(value, bool) or not isinstance(value, int):
        raise GraphParseError(f"{what} must be an integer, got {value!r}")
    return value


def parse_gml(source: Source, weighted: Optional[bool] = None) -> Graph:
    """
    Parse a GML file of the classic benchmark networks

    Node ids map to dense ids in ascending order and node names are the
    string form of the GML id. Scalar node attributes (label, value, ...)
    are kept for ground-truth loading. Edge "value" is the weight; when
    weighted is None the graph counts as weighted if any edge has one.
    Parallel edges need "multigraph 1", as in any GML reader.
    """
    try:
        parsed = nx.parse_gml(_read(source), label="id")
    except (nx.NetworkXError, ValueError) as e:
        raise GraphParseError(f"invalid GML: {e}")

    ids = sorted(_gml_int(node_id, "node id") for node_id in parsed.nodes)
    index = {node_id: i for i, node_id in enumerate(ids)}

    raw_edges = []
    for src, dst, weight in parsed.edges(data="value"):
        if weight is not None:
            if isinstance(weight, (str, bool)) or not math.isfinite(weight) or weight <= 0:
                raise GraphParseError(
                    f"edge ({src}, {dst}) value must be a positive number, got {weight!r}"
                )
        raw_edges.append((index[src], index[dst], weight))

    if weighted is None:
        weighted = any(w is not None for _, _, w in raw_edges)

    attributes = [
        {k: v for k, v in parsed.nodes[node_id].items() if not isinstance(v, (dict, list))}
        for node_id in ids
    ]
    # opposite arcs and multigraph duplicates fold into one summed edge
    graph = fold_directed(
        [str(node_id) for node_id in ids],
        ((s, d, float(w) if w is not None else 1.0) for s, d, w in raw_edges),
        weighted=weighted,
        node_attributes=attributes,
    )
    if graph.dropped_self_loops:
        console.warn(f"Dropped {graph.dropped_self_loops} self-loop edge(s)")
    if parsed.is_directed():
        console.info(f"Folded directed GML into {graph.m} undirected edges")
    return graph


# -----------------------
# Ground truth
# -----------------------

def _dense_labels(raw: Sequence[object]) -> Tuple[int, ...]:
    """Relabel to 0..C-1 by first appearance in node-id order"""
    mapping: Dict[object, int] = {}
    return tuple(mapping.setdefault(label, len(mapping)) for label in raw)


def load_ground_truth(source: Optional[Source], graph: Graph,
                      attribute: Optional[str] = None) -> GroundTruth:
    """
    Load one community label per node

    Args:
        source: "node_name label" lines, or None when reading a GML attribute
        graph: Graph the labels belong to
        attribute: GML node attribute holding the label (e.g. "value")

    Returns:
        GroundTruth with labels re-mapped to dense integers
    """
    raw: List[object] = [None] * graph.n

    if source is None:
        if attribute is None:
            raise GroundTruthError("either a label stream or a node attribute is required")
        for i in range(graph.n):
            raw[i] = graph.attribute(i, attribute)
    else:
        by_label: Dict[str, int] = {}
        for i in range(graph.n):
            label = graph.attribute(i, "label")
            if label is not None:
                by_label.setdefault(str(label), i)

        unknown = []
        for line_number, line in enumerate(_read(source).splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.rsplit(None, 1)
            if len(parts) != 2:
                raise GroundTruthError(f"line {line_number}: expected 'node_name label'")
            name, label = parts
            node = graph.index.get(name, by_label.get(name))
            if node is None:
                unknown.append(name)
                continue
            if raw[node] is not None and raw[node] != label:
                raise GroundTruthError(f"line {line_number}: node {name!r} has two labels")
            raw[node] = label
        if unknown:
            raise GroundTruthError("unknown node(s) in ground truth", unknown)

    missing = [graph.node_names[i] for i in range(graph.n) if raw[i] is None]
    if missing:
        raise GroundTruthError("node(s) without a ground-truth label", missing)

    return GroundTruth(labels=_dense_labels(raw), names=graph.node_names)


# -----------------------
# Files
# -----------------------

def _read_utf8(path: str, error: type) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except UnicodeDecodeError as e:
        raise error(f"{path} is not valid UTF-8 (byte {e.start})")


def load_graph(path: str, fmt: str = "edgelist", directed: bool = False,
               weighted: bool = False) -> Graph:
    """Load a graph file from disk"""
    if not os.path.exists(path):
        raise GraphParseError(f"file not found: {path}")
    if fmt not in ("edgelist", "gml"):
        raise GraphParseError(f"unknown graph format {fmt!r}")
    text = _read_utf8(path, GraphParseError)
    if fmt == "gml":
        # GML files declare direction themselves
        return parse_gml(text, weighted=weighted)
    return parse_edge_list(text, directed=directed, weighted=weighted)


def load_ground_truth_file(source: str, graph: Graph) -> GroundTruth:
    """
    Ground truth from a "name label" file, or from a GML node attribute
    when source is written as "attr:NAME"
    """
    if source.startswith("attr:"):
        return load_ground_truth(None, graph, attribute=source[len("attr:"):])
    if not os.path.exists(source):
        raise GroundTruthError(f"ground truth file not found: {source}")
    return load_ground_truth(_read_utf8(source, GroundTruthError), graph)
