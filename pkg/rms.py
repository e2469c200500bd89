"""
Revised Medoid-Shift (RMS)

Every node starts as a medoid and repeatedly shifts to the member of
{itself} ∪ KNN(itself) with the largest Similarity Sum (the summed
similarity to its k nearest neighbours). Nodes whose shift chains end at
the same fixed point form one community.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

import config
from errors import ConvergenceError, InvariantViolation, ParameterError
from modules import console
from modules.data import Graph
from modules.similarity import SimilarityMatrix, similarity_for

TIE_RULES = ("lowest_index", "prefer_self")


@dataclass(frozen=True)
class KnnIndex:
    """k nearest neighbours and Similarity Sum of every node"""

    k: int
    nn: np.ndarray
    dl: np.ndarray

    def __post_init__(self):
        self.nn.setflags(write=False)
        self.dl.setflags(write=False)

    @property
    def n(self) -> int:
        return self.dl.shape[0]


@dataclass(frozen=True)
class Clustering:
    """Converged medoid map, its centers and (once assigned) the labels"""

    next_medoid: Tuple[int, ...]
    centers: Tuple[int, ...]
    iterations: int
    labels: Optional[Tuple[int, ...]] = None
    algorithm: str = "rms"
    params: Dict[str, object] = field(default_factory=dict, compare=False)

    @property
    def num_clusters(self) -> int:
        return len(self.centers)

    @property
    def n(self) -> int:
        return len(self.next_medoid)


def compute_knn_index(s: SimilarityMatrix, k: int) -> KnnIndex:
    """
    KNN lists and Similarity Sums

    Neighbours are ranked by similarity (descending), ties by node index
    (ascending). k larger than n - 1 is clamped.

    Args:
        s: Similarity matrix
        k: Number of neighbours, at least 1

    Returns:
        KnnIndex with nn of shape (n, min(k, n - 1))
    """
    if k < 1:
        raise ParameterError(f"k must be at least 1, got {k}")
    n = s.n
    if n == 0:
        raise ParameterError("cannot build a KNN index for an empty graph")

    width = min(k, n - 1)
    if k > n - 1:
        console.warn(f"k={k} exceeds n-1={n - 1}; clamped to {width}")

    ranked = np.array(s.values, dtype=float)
    np.fill_diagonal(ranked, -np.inf)
    # stable sort on negated values keeps equal similarities in index order
    nn = np.argsort(-ranked, axis=1, kind="stable")[:, :width]
    dl = np.take_along_axis(np.asarray(s.values, dtype=float), nn, axis=1).sum(axis=1)
    return KnnIndex(k=width, nn=nn, dl=dl)


def _shift_targets(s: SimilarityMatrix, knn: KnnIndex, tie_rule: str) -> np.ndarray:
    """Best member of {i} ∪ similar KNN(i) for every node i"""
    targets = np.arange(knn.n)
    for i in range(knn.n):
        # neighbours with zero similarity are not candidates
        candidates = [i] + [int(p) for p in knn.nn[i] if s.values[i, p] > 0]
        best = max(knn.dl[p] for p in candidates)
        tied = [p for p in candidates if knn.dl[p] == best]
        if tie_rule == "prefer_self" and i in tied:
            targets[i] = i
        else:
            targets[i] = min(tied)
    return targets


def medoid_clustering(s: SimilarityMatrix, k: int, max_iterations: Optional[int] = None,
                      tie_rule: Optional[str] = None) -> Clustering:
    """
    Shift the current medoid set until it maps onto itself

    SetA starts as every node. Each round maps every i in SetA to its best
    candidate and collects the targets in SetB; the loop ends when SetA and
    SetB are equal as sets. Nodes that left SetA keep their last target.

    Args:
        s: Similarity matrix
        k: Neighbourhood size
        max_iterations: Round cap, defaults to n
        tie_rule: "lowest_index" (default) or "prefer_self"

    Returns:
        Clustering without labels
    """
    tie_rule = tie_rule or config.DEFAULT_TIE_RULE
    if tie_rule not in TIE_RULES:
        raise ParameterError(f"unknown tie rule {tie_rule!r} (use {', '.join(TIE_RULES)})")
    knn = compute_knn_index(s, k)
    n = knn.n
    if max_iterations is None:
        max_iterations = n
    if max_iterations < 1:
        raise ParameterError(f"max_iterations must be at least 1, got {max_iterations}")

    targets = _shift_targets(s, knn, tie_rule)
    next_medoid = list(range(n))
    set_a = set(range(n))

    for iteration in range(1, max_iterations + 1):
        set_b = set()
        for i in set_a:
            next_medoid[i] = int(targets[i])
            set_b.add(int(targets[i]))
        if set_a == set_b:
            for c in set_a:
                next_medoid[c] = c
            return Clustering(
                next_medoid=tuple(next_medoid),
                centers=tuple(sorted(set_a)),
                iterations=iteration,
                algorithm="rms",
                params={"k": k, "effective_k": knn.k, "tie_rule": tie_rule},
            )
        previous, set_a = set_a, set_b

    raise ConvergenceError(f"medoid sets did not converge within {max_iterations} iterations",
                           previous=previous, current=set_a)


def assign_labels(c: Clustering) -> Clustering:
    """Label every node with the center its next_medoid chain ends at"""
    n = c.n
    labels = []
    for i in range(n):
        m, steps = i, 0
        while c.next_medoid[m] != m:
            m = c.next_medoid[m]
            steps += 1
            if steps > n:
                raise InvariantViolation(f"medoid chain from node {i} does not terminate")
        labels.append(m)

    if set(labels) != set(c.centers):
        raise InvariantViolation(
            f"labels use {len(set(labels))} centers but the clustering has {len(c.centers)}"
        )
    return replace(c, labels=tuple(labels))


def run_rms(g: Graph, k: int, max_iterations: Optional[int] = None,
            tie_rule: Optional[str] = None) -> Clustering:
    """Similarity -> KNN -> medoid clustering -> labels"""
    if g.n == 0:
        raise ParameterError("graph has no nodes")
    s = similarity_for(g)
    clustering = medoid_clustering(s, k, max_iterations=max_iterations, tie_rule=tie_rule)
    return assign_labels(clustering)


def check_clustering(c: Clustering):
    """Raise InvariantViolation unless c is a valid labelled clustering"""
    centers = set(c.centers)
    for center in centers:
        if c.next_medoid[center] != center:
            raise InvariantViolation(f"center {center} is not a fixed point")
    if c.labels is None:
        raise InvariantViolation("clustering has no labels")
    if len(c.labels) != c.n:
        raise InvariantViolation("labels do not cover every node")
    if not set(c.labels) <= centers:
        raise InvariantViolation("a label is not a center")
    if len(set(c.labels)) != c.num_clusters:
        raise InvariantViolation("distinct labels do not match the number of clusters")
