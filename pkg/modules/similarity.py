"""
Similarity and distance matrices

Unweighted graphs use common-neighbour counts, weighted graphs use the edge
weights directly. Distances for the Medoid-Shift baseline are derived from
similarities with one of two monotone transforms.

Matrices are dense |V| x |V| arrays, fine for graphs of a few thousand nodes.
"""

import io
from dataclasses import dataclass

import numpy as np
import pandas as pd

from errors import ParameterError
from modules.data import Graph

TRANSFORMS = ("reciprocal", "max_minus")


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric, non-negative, zero diagonal"""

    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric, non-negative, zero diagonal"""

    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def similarity_unweighted(g: Graph) -> SimilarityMatrix:
    """SimM(i, j) = |N(i) ∩ N(j)| for i != j, computed on the 0/1 support of g"""
    a = g.adjacency_matrix(binary=True)
    # (A @ A)[i, j] counts common neighbours; integer-valued so exact in float64
    common = a @ a
    np.fill_diagonal(common, 0.0)
    return SimilarityMatrix(values=common)


def similarity_weighted(g: Graph) -> SimilarityMatrix:
    """SimM(i, j) = w(i, j) for edges, 0 otherwise"""
    values = g.adjacency_matrix()
    np.fill_diagonal(values, 0.0)
    return SimilarityMatrix(values=values)


def similarity_for(g: Graph) -> SimilarityMatrix:
    """Pick the similarity that matches the graph's weighting"""
    return similarity_weighted(g) if g.is_weighted else similarity_unweighted(g)


def distance_from_similarity(s: SimilarityMatrix, transform: str = "reciprocal") -> DistanceMatrix:
    """
    Turn similarities into distances

    Args:
        s: Similarity matrix
        transform: "reciprocal" -> 1 / (1 + SimM), "max_minus" -> max_sim - SimM

    Returns:
        DistanceMatrix with a zero diagonal
    """
    if s.n == 0:
        raise ParameterError("cannot derive distances from an empty similarity matrix")
    if transform not in TRANSFORMS:
        raise ParameterError(f"unknown distance transform {transform!r} (use {', '.join(TRANSFORMS)})")

    sim = np.asarray(s.values, dtype=float)
    if transform == "reciprocal":
        d = 1.0 / (1.0 + sim)
    else:
        off_diagonal = sim[~np.eye(s.n, dtype=bool)]
        max_sim = off_diagonal.max() if off_diagonal.size else 0.0
        d = max_sim - sim
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(values=d)


def matrix_to_csv(values: np.ndarray) -> str:
    """Full row-major CSV dump, one matrix row per line, no header"""
    buffer = io.StringIO()
    pd.DataFrame(values).to_csv(buffer, header=False, index=False, float_format="%.10g",
                                lineterminator="\n")
    return buffer.getvalue()


def similarity_to_csv(s: SimilarityMatrix) -> str:
    return matrix_to_csv(s.values)
