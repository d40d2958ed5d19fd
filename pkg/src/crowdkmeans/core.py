"""Shared numeric types: datasets, centroid sets, feature statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import DimensionMismatch, InvalidDataset, LengthMismatch


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """An ``n x d`` matrix of finite reals with optional ground-truth labels.

    Arrays are copied and marked read-only on construction.
    """

    points: np.ndarray
    truth_labels: Optional[np.ndarray] = None
    name: str = "dataset"

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise InvalidDataset(f"points must be a non-empty 2-D matrix, got shape {points.shape}")
        if not np.all(np.isfinite(points)):
            raise InvalidDataset("points contain NaN or Inf")
        object.__setattr__(self, "points", _frozen(points))
        if self.truth_labels is not None:
            labels = np.asarray(self.truth_labels)
            if labels.ndim != 1 or labels.shape[0] != points.shape[0]:
                raise LengthMismatch(
                    f"truth_labels has shape {labels.shape}, expected ({points.shape[0]},)"
                )
            if not np.issubdtype(labels.dtype, np.integer):
                raise InvalidDataset("truth_labels must be integers")
            object.__setattr__(self, "truth_labels", _frozen(labels.astype(np.int64)))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def n_truth_clusters(self) -> Optional[int]:
        if self.truth_labels is None:
            return None
        return int(np.unique(self.truth_labels).size)


@dataclass(frozen=True)
class FeatureStats:
    per_feature_min: np.ndarray
    per_feature_max: np.ndarray
    global_max: float


@dataclass(frozen=True)
class CentroidSet:
    """``k x d`` centroid matrix; ``source_indices`` is set when the rows are data points."""

    centers: np.ndarray
    source_indices: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=np.float64)
        if centers.ndim == 1:
            centers = centers.reshape(-1, 1)
        if centers.ndim != 2 or centers.shape[0] < 1:
            raise InvalidDataset(f"centers must be a non-empty 2-D matrix, got shape {centers.shape}")
        if not np.all(np.isfinite(centers)):
            raise InvalidDataset("centers contain NaN or Inf")
        object.__setattr__(self, "centers", _frozen(centers))
        if self.source_indices is not None:
            idx = np.asarray(self.source_indices, dtype=np.int64)
            if idx.shape != (centers.shape[0],):
                raise LengthMismatch("source_indices must have one entry per centroid")
            if np.unique(idx).size != idx.size:
                raise InvalidDataset("source_indices must be distinct")
            object.__setattr__(self, "source_indices", _frozen(idx))

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @classmethod
    def from_indices(cls, points: np.ndarray, indices) -> "CentroidSet":
        indices = np.asarray(indices, dtype=np.int64)
        return cls(points[indices], indices)


PointsLike = Union[Dataset, np.ndarray]


def as_points(data: PointsLike) -> np.ndarray:
    """Return the point matrix of a :class:`Dataset` or validate a raw array."""
    if isinstance(data, Dataset):
        return data.points
    return Dataset(data).points


def as_centers(centroids) -> np.ndarray:
    if isinstance(centroids, CentroidSet):
        return centroids.centers
    return CentroidSet(centroids).centers


def check_labels(labels, n: int, k: Optional[int] = None) -> np.ndarray:
    """Validate a label vector of length ``n`` with entries in ``[0, k)``."""
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.shape[0] != n:
        raise LengthMismatch(f"labels have shape {labels.shape}, expected ({n},)")
    if labels.size and not np.issubdtype(labels.dtype, np.integer):
        raise InvalidDataset("labels must be integers")
    labels = labels.astype(np.int64)
    if k is not None and labels.size and (labels.min() < 0 or labels.max() >= k):
        raise InvalidDataset(f"labels must lie in [0, {k})")
    return labels


def check_dims(points: np.ndarray, centers: np.ndarray) -> None:
    if points.shape[1] != centers.shape[1]:
        raise DimensionMismatch(
            f"centroids have {centers.shape[1]} features, dataset has {points.shape[1]}"
        )


def feature_stats(dataset: PointsLike) -> FeatureStats:
    """Componentwise min and max over rows, plus the largest per-feature max."""
    points = as_points(dataset)
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    return FeatureStats(_frozen(lo), _frozen(hi), float(hi.max()))


def standardize(dataset: Dataset) -> Dataset:
    """Scale every feature to zero mean and unit population standard deviation.

    Constant features become all-zero columns.
    """
    points = dataset.points
    mean = points.mean(axis=0)
    centered = points - mean
    std = np.sqrt(np.mean(centered**2, axis=0))
    # relative threshold: a feature whose spread is pure rounding noise counts as constant
    scale = np.maximum(np.abs(mean), 1.0)
    constant = std <= 1e-12 * scale
    safe = np.where(constant, 1.0, std)
    out = np.where(constant, 0.0, centered / safe)
    return Dataset(out, dataset.truth_labels, dataset.name)
