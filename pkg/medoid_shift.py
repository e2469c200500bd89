"""
Medoid-Shift baseline

Each node shifts to the node j inside its radius ball that minimises
S(i, j) = Σ_k D(j, k) φ(D(i, k)), with φ(d) = exp(-d / 2) truncated at the
radius. Following the shifts from every node leads to a root; nodes that
share a root form one cluster.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

import config
from errors import ConvergenceError, ParameterError
from modules.data import Graph
from modules.similarity import (TRANSFORMS, DistanceMatrix, distance_from_similarity,
                                similarity_for)
from rms import Clustering, assign_labels

KERNELS = ("gaussian", "flat")

# scores this close to the minimum (relative) count as tied
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ShiftConfig:
    """Radius, distance transform and kernel of one baseline run"""

    radius: float
    transform: str = config.DEFAULT_TRANSFORM
    kernel: str = config.DEFAULT_KERNEL

    def __post_init__(self):
        if math.isnan(self.radius) or self.radius < 0:
            raise ParameterError(f"radius must be non-negative, got {self.radius}")
        if self.transform not in TRANSFORMS:
            raise ParameterError(f"unknown distance transform {self.transform!r}")
        if self.kernel not in KERNELS:
            raise ParameterError(f"unknown kernel {self.kernel!r} (use {', '.join(KERNELS)})")


def kernel_weights(distances: np.ndarray, radius: float, kernel: str = "gaussian") -> np.ndarray:
    """φ applied element-wise, zero outside the closed radius ball"""
    distances = np.asarray(distances, dtype=float)
    if kernel == "gaussian":
        weights = np.exp(-distances / 2.0)
    else:
        weights = np.ones_like(distances)
    weights[distances > radius] = 0.0
    return weights


def shift_scores(d: DistanceMatrix, i: int, radius: float = math.inf,
                 kernel: str = "gaussian") -> np.ndarray:
    """S(i, ·) for a single node"""
    phi = kernel_weights(d.values[i], radius, kernel)
    return np.asarray(d.values) @ phi


def score_matrix(d: DistanceMatrix, radius: float = math.inf, kernel: str = "gaussian") -> np.ndarray:
    """All S(i, j) at once: row i of Φ times D"""
    phi = kernel_weights(d.values, radius, kernel)
    return phi @ np.asarray(d.values)


def medoid_shift_map(d: DistanceMatrix, cfg: ShiftConfig) -> np.ndarray:
    """
    One shift step for every node

    The argmin runs over nodes within the radius of i (always including i);
    near-ties go to the lowest index.
    """
    scores = score_matrix(d, cfg.radius, cfg.kernel)
    targets = np.arange(d.n)
    for i in range(d.n):
        ball = d.values[i] <= cfg.radius
        ball[i] = True
        row = np.where(ball, scores[i], np.inf)
        best = row.min()
        tied = np.flatnonzero(row <= best + TIE_TOLERANCE * max(1.0, abs(best)))
        targets[i] = tied[0]
    return targets


def run_medoid_shift(g: Graph, cfg: ShiftConfig, max_iterations: Optional[int] = None) -> Clustering:
    """
    Baseline clustering of a graph

    Args:
        g: Non-empty graph
        cfg: Radius, transform and kernel
        max_iterations: Cap on map applications, defaults to n

    Returns:
        Labelled Clustering whose centers are the roots of the shift map
    """
    if g.n == 0:
        raise ParameterError("graph has no nodes")
    d = distance_from_similarity(similarity_for(g), cfg.transform)
    return medoid_shift_clustering(d, cfg, max_iterations=max_iterations)


def medoid_shift_clustering(d: DistanceMatrix, cfg: ShiftConfig,
                            max_iterations: Optional[int] = None) -> Clustering:
    """Shift map, its roots and labels for a prepared distance matrix"""
    n = d.n
    mapping = medoid_shift_map(d, cfg)

    if max_iterations is None:
        max_iterations = n
    current = np.arange(n)
    for iteration in range(1, max_iterations + 1):
        following = mapping[current]
        if np.array_equal(following, current):
            break
        current = following
    else:
        raise ConvergenceError(f"medoid map did not stabilise within {max_iterations} iterations",
                               previous=set(current.tolist()),
                               current=set(mapping[current].tolist()))

    roots = tuple(int(i) for i in np.flatnonzero(mapping == np.arange(n)))
    clustering = Clustering(
        next_medoid=tuple(int(t) for t in mapping),
        centers=roots,
        iterations=iteration,
        algorithm="medoid-shift",
        params={"radius": cfg.radius, "transform": cfg.transform, "kernel": cfg.kernel},
    )
    return assign_labels(clustering)


def radius_grid(d: DistanceMatrix, steps: int = config.RADIUS_STEPS) -> list:
    """Evenly spaced radii from 0 to the largest off-diagonal distance"""
    if steps < 1:
        raise ParameterError(f"steps must be at least 1, got {steps}")
    off_diagonal = d.values[~np.eye(d.n, dtype=bool)]
    top = float(off_diagonal.max()) if off_diagonal.size else 0.0
    if steps == 1:
        return [top]
    return [float(r) for r in np.linspace(0.0, top, steps)]
