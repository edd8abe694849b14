"""
K-Means Partitioning

Lloyd iterations from k-means++ seeding, best of several seeded restarts by
within-cluster sum of squares (WCSS). Partitions the embedding space so that
region flags can be routed to the partition a post falls in.
"""

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import structlog

from src.domain.errors import FeatureDimensionError, NotEnoughPointsError

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class PartitionModel:
    """k centroids of a shared dimension."""
    centroids: np.ndarray
    seed: int = 0
    wcss: float = 0.0
    iterations: int = 0
    wcss_history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def k(self) -> int:
        return int(self.centroids.shape[0])

    @property
    def dim(self) -> int:
        return int(self.centroids.shape[1])

    def to_dict(self) -> dict[str, Any]:
        return {
            "centroids": self.centroids.tolist(),
            "seed": int(self.seed),
            "wcss": float(self.wcss),
            "iterations": int(self.iterations),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PartitionModel":
        return cls(
            centroids=np.asarray(data["centroids"], dtype=np.float64),
            seed=int(data["seed"]),
            wcss=float(data["wcss"]),
            iterations=int(data["iterations"]),
        )

    def __repr__(self) -> str:
        return f"PartitionModel(k={self.k}, dim={self.dim}, wcss={self.wcss:.4f})"


def _squared_distances(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _kmeans_plusplus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[rng.integers(0, n)]
    closest = ((X - centroids[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = closest.sum()
        if total > 0:
            next_idx = rng.choice(n, p=closest / total)
        else:
            # Every point coincides with a chosen centroid.
            next_idx = rng.integers(0, n)
        centroids[i] = X[next_idx]
        closest = np.minimum(closest, ((X - centroids[i]) ** 2).sum(axis=1))
    return centroids


def _lloyd(
    X: np.ndarray,
    centroids: np.ndarray,
    max_iter: int,
    tol: float,
) -> tuple[np.ndarray, float, int, list[float]]:
    history: list[float] = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        distances = _squared_distances(X, centroids)
        labels = np.argmin(distances, axis=1)
        point_cost = distances[np.arange(X.shape[0]), labels]
        wcss = float(point_cost.sum())
        history.append(wcss)
        if len(history) > 1:
            previous = history[-2]
            if wcss == 0.0 or (previous - wcss) / previous < tol:
                break

        updated = centroids.copy()
        for j in range(centroids.shape[0]):
            members = labels == j
            if np.any(members):
                updated[j] = X[members].mean(axis=0)
            else:
                # Re-seed an empty cluster at the point farthest from its centroid.
                far = int(np.argmax(point_cost))
                updated[j] = X[far]
                point_cost[far] = 0.0
        centroids = updated

    return centroids, history[-1], iterations, history


def kmeans_fit(
    points: Sequence[np.ndarray] | np.ndarray,
    k: int,
    seed: int = 0,
    restarts: int = 5,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> PartitionModel:
    """
    Partition points into k clusters.

    Args:
        points: Dense vectors of a shared dimension
        k: Number of clusters (>= 1)
        seed: RNG seed; identical inputs and seed give identical centroids
        restarts: Independent k-means++ runs; the lowest WCSS wins, earliest on ties
        max_iter: Lloyd iteration cap per run
        tol: Relative WCSS improvement below which a run stops

    Returns:
        PartitionModel

    Raises:
        NotEnoughPointsError: fewer points than k
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2:
        X = X.reshape(len(X), -1)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if X.shape[0] < k:
        raise NotEnoughPointsError(f"k-means needs at least k={k} points, got {X.shape[0]}")

    rng = np.random.default_rng(seed)
    best = None
    for restart in range(max(1, restarts)):
        seeds = _kmeans_plusplus(X, k, rng)
        centroids, wcss, iterations, history = _lloyd(X, seeds, max_iter, tol)
        if best is None or wcss < best[1]:
            best = (centroids, wcss, iterations, history)

    centroids, wcss, iterations, history = best
    model = PartitionModel(
        centroids=centroids,
        seed=seed,
        wcss=wcss,
        iterations=iterations,
        wcss_history=tuple(history),
    )
    logger.debug("kmeans_fitted", k=k, points=int(X.shape[0]), wcss=wcss, iterations=iterations)
    return model


def kmeans_assign(model: PartitionModel, x: np.ndarray) -> int:
    """
    Index of the nearest centroid by Euclidean distance; lowest index on ties.

    Raises:
        FeatureDimensionError: x does not match the centroid dimension
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise FeatureDimensionError(f"Vector shape {x.shape} != ({model.dim},)")
    return int(np.argmin(((model.centroids - x) ** 2).sum(axis=1)))
