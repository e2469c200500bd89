"""
Partition quality metrics

Entropy, mutual information and NMI (log base 2) against a ground truth,
and modularity in its adjacency-matrix and community-sum forms.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
from sklearn.metrics.cluster import contingency_matrix

from errors import ParameterError
from modules.data import Graph


@dataclass(frozen=True)
class MetricsReport:
    """Quality of one clustering"""

    num_clusters: int
    modularity: Optional[float] = None
    nmi: Optional[float] = None

    def to_dict(self) -> Dict:
        report = {"num_clusters": self.num_clusters}
        if self.modularity is not None:
            report["modularity"] = self.modularity
        if self.nmi is not None:
            report["nmi"] = self.nmi
        return report


def _check_pair(y: Sequence, c: Sequence):
    if len(y) != len(c):
        raise ParameterError(f"label vectors differ in length ({len(y)} vs {len(c)})")


def _plogp(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def entropy(partition: Sequence) -> float:
    """Shannon entropy of a label vector, in bits"""
    if len(partition) == 0:
        return 0.0
    _, counts = np.unique(np.asarray(partition), return_counts=True)
    return _plogp(counts / counts.sum())


def mutual_information(y: Sequence, c: Sequence) -> float:
    """I(Y;C) = H(Y) - H(Y|C), in bits"""
    _check_pair(y, c)
    if len(y) == 0:
        return 0.0
    table = contingency_matrix(np.asarray(y), np.asarray(c)).astype(float)
    n = table.sum()
    cluster_sizes = table.sum(axis=0)

    conditional = 0.0
    for j, size in enumerate(cluster_sizes):
        conditional += (size / n) * _plogp(table[:, j] / size)

    return float(max(0.0, entropy(y) - conditional))


def nmi(y: Sequence, c: Sequence) -> float:
    """2 I(Y;C) / (H(Y) + H(C)); two single-class partitions score 1"""
    _check_pair(y, c)
    if len(y) == 0:
        raise ParameterError("NMI of empty label vectors is undefined")
    total = entropy(y) + entropy(c)
    if total == 0.0:
        return 1.0
    return float(min(1.0, max(0.0, 2.0 * mutual_information(y, c) / total)))


def _check_labels(g: Graph, labels: Sequence) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != (g.n,):
        raise ParameterError(f"expected {g.n} labels, got {labels.shape[0] if labels.ndim else 0}")
    return labels


def modularity_adjacency(g: Graph, labels: Sequence) -> float:
    """
    Q = 1/2m Σ_ij (A_ij - k_i k_j / 2m) δ(c_i, c_j) over ordered pairs

    Only defined for unweighted graphs; weighted graphs go through
    modularity_weighted.
    """
    if g.is_weighted or any(w != 1.0 for _, _, w in g.edges):
        raise ParameterError("modularity_adjacency needs an unweighted graph; use modularity_weighted")
    labels = _check_labels(g, labels)
    if g.m == 0:
        return 0.0

    a = g.adjacency_matrix(binary=True)
    k = a.sum(axis=1)
    two_m = 2.0 * g.m
    same = labels[:, None] == labels[None, :]
    return float(((a - np.outer(k, k) / two_m) * same).sum() / two_m)


def modularity_weighted(g: Graph, labels: Sequence) -> float:
    """
    Q = Σ_c (e_c / m - (d_c / 2m)^2)

    m is the total edge weight, e_c the weight of edges inside community c
    (each edge counted once) and d_c the summed weighted degree of c.
    Unweighted graphs count every edge as weight 1.
    """
    labels = _check_labels(g, labels)
    m = g.total_weight
    if m == 0:
        return 0.0

    _, community = np.unique(labels, return_inverse=True)
    count = community.max() + 1
    inside = np.zeros(count)
    degree = np.zeros(count)
    for u, v, w in g.edges:
        degree[community[u]] += w
        degree[community[v]] += w
        if community[u] == community[v]:
            inside[community[u]] += w

    return float((inside / m - (degree / (2.0 * m)) ** 2).sum())


def modularity(g: Graph, labels: Sequence) -> float:
    """Adjacency form for unweighted graphs, community-sum form otherwise"""
    if g.is_weighted:
        return modularity_weighted(g, labels)
    return modularity_adjacency(g, labels)


def evaluate(g: Graph, labels: Sequence, truth: Optional[Sequence] = None) -> MetricsReport:
    """Modularity always, NMI when a ground truth is given"""
    labels = _check_labels(g, labels)
    return MetricsReport(
        num_clusters=len(np.unique(labels)) if g.n else 0,
        modularity=modularity(g, labels),
        nmi=nmi(truth, labels) if truth is not None else None,
    )
