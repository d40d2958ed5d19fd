"""Lloyd's k-means iteration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .core import CentroidSet, Dataset, PointsLike, as_centers, as_points, check_dims, check_labels, standardize
from .errors import BadK, EmptyCluster, InvalidDataset

# rows per block when materializing point-to-centroid differences
_CHUNK = 4096


@dataclass(frozen=True)
class KmeansConfig:
    max_iter: int = 300
    # threshold on the total squared centroid movement between iterations
    tol: float = 1e-6
    standardize_first: bool = False

    def __post_init__(self):
        if int(self.max_iter) < 1:
            raise InvalidDataset("max_iter must be >= 1")
        if not self.tol >= 0:
            raise InvalidDataset("tol must be >= 0")


@dataclass(frozen=True)
class KmeansResult:
    labels: np.ndarray
    centroids: CentroidSet
    inertia: float
    iterations: int
    converged: bool
    # inertia after every update step, first entry is the seeding cost
    history: List[float] = field(default_factory=list, compare=False)


def _squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    out = np.empty((points.shape[0], centers.shape[0]))
    for start in range(0, points.shape[0], _CHUNK):
        block = points[start:start + _CHUNK]
        diff = block[:, None, :] - centers[None, :, :]
        out[start:start + _CHUNK] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def _point_costs(points: np.ndarray, centers: np.ndarray, labels: np.ndarray) -> np.ndarray:
    diff = points - centers[labels]
    return np.einsum("ij,ij->i", diff, diff)


def assign_points(dataset: PointsLike, centroids) -> np.ndarray:
    """Label each point with its nearest centroid; ties go to the lowest index."""
    points = as_points(dataset)
    centers = as_centers(centroids)
    check_dims(points, centers)
    return np.argmin(_squared_distances(points, centers), axis=1).astype(np.int64)


def update_centroids(dataset: PointsLike, labels, k: int) -> CentroidSet:
    """Cluster means.

    Raises:
        EmptyCluster: some index in ``[0, k)`` has no members.
    """
    points = as_points(dataset)
    labels = check_labels(labels, points.shape[0], k)
    counts = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise EmptyCluster(int(empty[0]))
    # bincount sums sequentially, so the result does not depend on threading
    sums = np.column_stack(
        [np.bincount(labels, weights=points[:, j], minlength=k) for j in range(points.shape[1])]
    )
    return CentroidSet(sums / counts[:, None])


def _repair_empty(points, centers, labels, k) -> np.ndarray:
    """Move the point farthest from its centroid into each empty cluster."""
    labels = labels.copy()
    counts = np.bincount(labels, minlength=k)
    costs = _point_costs(points, centers, labels)
    for c in np.flatnonzero(counts == 0):
        # donors must keep at least one member
        movable = counts[labels] > 1
        i = int(np.argmax(np.where(movable, costs, -np.inf)))
        counts[labels[i]] -= 1
        labels[i] = c
        counts[c] = 1
        costs[i] = 0.0
    return labels


def run_kmeans(dataset: PointsLike, seed_centroids, config: KmeansConfig = KmeansConfig()) -> KmeansResult:
    """Alternate nearest-centroid assignment and mean updates.

    Empty clusters are reseeded with the point farthest from its assigned
    centroid.  Stops once the total squared centroid movement is at most
    ``config.tol`` or after ``config.max_iter`` iterations.
    """
    if config.standardize_first:
        if not isinstance(dataset, Dataset):
            dataset = Dataset(dataset)
        dataset = standardize(dataset)
    points = as_points(dataset)
    centers = as_centers(seed_centroids)
    check_dims(points, centers)
    k = centers.shape[0]
    if k > points.shape[0]:
        raise BadK(f"k={k} exceeds n={points.shape[0]}")

    labels = assign_points(points, centers)
    history = [float(_point_costs(points, centers, labels).sum())]
    converged = False
    iterations = 0
    while iterations < config.max_iter:
        iterations += 1
        if iterations > 1:
            labels = assign_points(points, centers)
        labels = _repair_empty(points, centers, labels, k)
        new_centers = update_centroids(points, labels, k).centers
        shift = float(np.sum((new_centers - centers) ** 2))
        centers = new_centers
        history.append(float(_point_costs(points, centers, labels).sum()))
        if shift <= config.tol:
            converged = True
            break

    inertia = float(_point_costs(points, centers, labels).sum())
    return KmeansResult(labels, CentroidSet(centers), inertia, iterations, converged, history)
