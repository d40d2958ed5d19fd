"""Crowding distance over a point cloud, treating every feature as an objective.

Two variants are provided.  :func:`crowding_standard` is the usual NSGA-II
style measure: per-feature gaps normalized by the feature range, with the two
extremes of each feature set to infinity.  :func:`crowding_modified` is the
variant used for seeding: the data are bracketed by an artificial ideal point
(componentwise min) and nadir point (componentwise max), gaps are left
unnormalized, and the two artificial extremes receive the finite value
``d * max(per_feature_max)``.  Only values for real points are returned.

Small values mean a crowded (dense) neighbourhood.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import PointsLike, as_points
from .errors import DegenerateFeature, EmptyInput

STANDARD = "standard"
MODIFIED = "modified"


@dataclass(frozen=True)
class CrowdingVector:
    values: np.ndarray
    variant: str
    # value assigned to the artificial ideal/nadir rows (modified variant only)
    boundary: Optional[float] = None

    def __len__(self):
        return self.values.shape[0]


def _finish(values: np.ndarray, variant: str, boundary=None) -> CrowdingVector:
    values.setflags(write=False)
    return CrowdingVector(values, variant, boundary)


def crowding_standard(dataset: PointsLike) -> CrowdingVector:
    """Range-normalized crowding distance with infinite extremes.

    Constant features contribute nothing (their range is zero) but still count
    in the divisor ``d``.

    Raises:
        EmptyInput: fewer than two points.
        DegenerateFeature: every feature is constant.
    """
    points = as_points(dataset)
    n, d = points.shape
    if n < 2:
        raise EmptyInput("standard crowding distance needs at least 2 points")
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    span = hi - lo
    if not np.any(span > 0):
        raise DegenerateFeature("every feature is constant")

    values = np.zeros(n)
    for j in range(d):
        if span[j] == 0:
            continue
        order = np.argsort(points[:, j], kind="stable")
        col = points[order, j]
        values[order[1:-1]] += (col[2:] - col[:-2]) / span[j]
        values[order[0]] = np.inf
        values[order[-1]] = np.inf
    return _finish(values / d, STANDARD)


def crowding_modified(dataset: PointsLike) -> CrowdingVector:
    """Unnormalized crowding distance over the ideal/nadir-augmented set.

    Per feature, real points are stably sorted (ties by row index) and placed
    between the ideal point (first) and the nadir point (last).  Each real
    point accumulates the gap between its two sorted neighbours; totals are
    divided by ``d``.  Every point is interior to the augmented order, so all
    returned values are finite and non-negative.
    """
    points = as_points(dataset)
    n, d = points.shape
    if n < 1:
        raise EmptyInput("crowding distance needs at least 1 point")
    lo = points.min(axis=0)
    hi = points.max(axis=0)

    values = np.zeros(n)
    for j in range(d):
        order = np.argsort(points[:, j], kind="stable")
        aug = np.concatenate(([lo[j]], points[order, j], [hi[j]]))
        values[order] += aug[2:] - aug[:-2]
    values /= d
    return _finish(values, MODIFIED, boundary=float(d * hi.max()))
