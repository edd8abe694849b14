"""
Noisy-Region Detection and Partition Flags

A region model pairs one global centroid classifier Pr with a k-means
partitioning of the same embedding space. For a post centroid v in partition j:

- PFlag_j = 1 iff Pr(v) >= 0.5 + alpha
- NFlag_j = 1 iff Pr(v) <= 0.5 - alpha

Everything else is 0, so between the thresholds (the noisy region) no flag is
set. The 2K outputs are laid out PFlag_0..PFlag_{K-1}, NFlag_0..NFlag_{K-1}.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

import numpy as np
import structlog

from src.embeddings.table import CentroidVector
from src.learners.kmeans import PartitionModel, kmeans_assign, kmeans_fit
from src.learners.logistic import LinearModel, LogisticConfig, predict_proba, train_logreg

logger = structlog.get_logger(__name__)


class Space(str, Enum):
    """Embedding space a region model lives in."""
    REGULAR = "regular"
    DISTORTED = "distorted"


@dataclass(frozen=True)
class RegionFlagModel:
    """Centroid classifier, noisy-region threshold and partitioner of one space."""
    centroid_classifier: LinearModel
    alpha: float
    partitioner: PartitionModel
    space: Space = Space.REGULAR

    def __post_init__(self):
        if not 0.0 <= self.alpha < 0.5:
            raise ValueError(f"alpha must be in [0, 0.5), got {self.alpha}")
        object.__setattr__(self, "space", Space(self.space))

    @property
    def k(self) -> int:
        return self.partitioner.k

    @property
    def size(self) -> int:
        """Number of emitted features (2K)."""
        return 2 * self.k

    def with_alpha(self, alpha: float) -> "RegionFlagModel":
        return RegionFlagModel(self.centroid_classifier, alpha, self.partitioner, self.space)

    def to_dict(self) -> dict[str, Any]:
        return {
            "centroid_classifier": self.centroid_classifier.to_dict(),
            "alpha": self.alpha,
            "partitioner": self.partitioner.to_dict(),
            "space": self.space.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RegionFlagModel":
        return cls(
            centroid_classifier=LinearModel.from_dict(data["centroid_classifier"]),
            alpha=float(data["alpha"]),
            partitioner=PartitionModel.from_dict(data["partitioner"]),
            space=Space(data["space"]),
        )


def flags_for(p: float, j: int, k: int, alpha: float) -> np.ndarray:
    """
    2K flags for classifier probability p in partition j.

    Both thresholds are inclusive. At alpha = 0 and p = 0.5 both conditions
    hold; PFlag is set.
    """
    flags = np.zeros(2 * k, dtype=np.int8)
    if p >= 0.5 + alpha:
        flags[j] = 1
    elif p <= 0.5 - alpha:
        flags[k + j] = 1
    return flags


def fit_region_model(
    vectors: Sequence[CentroidVector],
    labels: Sequence[int],
    alpha: float,
    k: int,
    seed: int,
    space: Space = Space.REGULAR,
    logistic: LogisticConfig = LogisticConfig(),
    restarts: int = 5,
    kmeans_max_iter: int = 100,
) -> RegionFlagModel:
    """
    Fit the centroid classifier and the k-partition model on the same vectors.

    Empty centroids (no token covered by the table) are excluded.

    Args:
        vectors: Training centroids (plain or IG-weighted)
        labels: 0/1 labels aligned with vectors
        alpha: Noisy-region threshold in [0, 0.5)
        k: Number of partitions
        seed: k-means seed
        space: Space the vectors live in

    Returns:
        RegionFlagModel

    Raises:
        EmptyDatasetError: no non-empty vector
        NotEnoughPointsError: fewer non-empty vectors than k
    """
    kept = [(v.values, y) for v, y in zip(vectors, labels) if not v.is_empty]
    points = np.array([values for values, _ in kept], dtype=np.float64)
    y = np.array([label for _, label in kept], dtype=np.int64)

    classifier = train_logreg(points, y, logistic)
    partitioner = kmeans_fit(points, k, seed=seed, restarts=restarts, max_iter=kmeans_max_iter)
    logger.info(
        "region_model_fitted",
        space=Space(space).value,
        k=k,
        alpha=alpha,
        points=len(kept),
        excluded=len(vectors) - len(kept),
    )
    return RegionFlagModel(classifier, alpha, partitioner, space)


def region_flags(model: RegionFlagModel, v: CentroidVector) -> np.ndarray:
    """
    2K binary flags for one centroid.

    Returns all zeros for an empty centroid.
    """
    if v.is_empty:
        return np.zeros(model.size, dtype=np.int8)
    p = predict_proba(model.centroid_classifier, v.values)
    j = kmeans_assign(model.partitioner, v.values)
    return flags_for(p, j, model.k, model.alpha)
