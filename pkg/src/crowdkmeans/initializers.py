"""Seeding strategies for k-means.

All initializers take ``(dataset, k)`` and return a :class:`CentroidSet`
whose rows are data points.  The stochastic ones also take ``rng_seed``,
which may be an integer or an existing ``numpy.random.Generator``.

Method identifiers (used by the CLI and in report files)::

    random     uniform sample without replacement
    kmeanspp   D^2 sampling (Arthur & Vassilvitskii)
    maxmin     farthest-first traversal from a random start
    ckmeans    the k most crowded points
    fckmeans   greedy max of distance-to-seeds / crowding
    rckmeans   sampling proportional to distance-to-seeds / crowding
"""

from __future__ import annotations

from typing import Callable, Dict, Optional, Union

import numpy as np

from .core import CentroidSet, PointsLike, as_points
from .crowding import crowding_modified
from .errors import BadK, DataError

RngLike = Union[int, np.integer, np.random.Generator, None]

METHODS = ("random", "kmeanspp", "maxmin", "ckmeans", "fckmeans", "rckmeans")
DETERMINISTIC = frozenset({"ckmeans", "fckmeans"})


def make_rng(rng_seed: RngLike) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(None if rng_seed is None else int(rng_seed))


def _check_k(n: int, k: int) -> int:
    if isinstance(k, bool) or int(k) != k:
        raise BadK(f"k must be an integer, got {k!r}")
    k = int(k)
    if k < 1 or k > n:
        raise BadK(f"k must satisfy 1 <= k <= n={n}, got {k}")
    return k


def _dist_to(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    diff = points - center
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _sample_proportional(weights: np.ndarray, available: np.ndarray, rng) -> int:
    """Draw an index with probability proportional to ``weights``.

    ``weights`` must already be zero outside ``available``.  If no weight is
    positive the draw is uniform over ``available``.
    """
    total = weights.sum()
    if not np.isfinite(total) or total <= 0:
        candidates = np.flatnonzero(available)
        return int(candidates[rng.integers(candidates.size)])
    cum = np.cumsum(weights)
    u = rng.random() * cum[-1]
    idx = int(np.searchsorted(cum, u, side="right"))
    return min(idx, weights.size - 1)


def _first_index(n: int, rng, first_index: Optional[int]) -> int:
    if first_index is None:
        return int(rng.integers(n))
    if not 0 <= first_index < n:
        raise DataError(f"first_index {first_index} out of range for n={n}")
    return int(first_index)


def init_random(dataset: PointsLike, k: int, rng_seed: RngLike = None) -> CentroidSet:
    points = as_points(dataset)
    k = _check_k(points.shape[0], k)
    rng = make_rng(rng_seed)
    idx = rng.choice(points.shape[0], size=k, replace=False)
    return CentroidSet.from_indices(points, idx)


def init_kmeanspp(
    dataset: PointsLike, k: int, rng_seed: RngLike = None, first_index: Optional[int] = None
) -> CentroidSet:
    """k-means++ seeding with squared-distance weights.

    Args:
        first_index: pin the first centroid instead of drawing it uniformly.
    """
    points = as_points(dataset)
    n = points.shape[0]
    k = _check_k(n, k)
    rng = make_rng(rng_seed)
    chosen = [_first_index(n, rng, first_index)]
    available = np.ones(n, dtype=bool)
    available[chosen[0]] = False
    d2 = _dist_to(points, points[chosen[0]]) ** 2
    while len(chosen) < k:
        weights = np.where(available, d2, 0.0)
        nxt = _sample_proportional(weights, available, rng)
        chosen.append(nxt)
        available[nxt] = False
        d2 = np.minimum(d2, _dist_to(points, points[nxt]) ** 2)
    return CentroidSet.from_indices(points, chosen)


def init_maxmin(
    dataset: PointsLike, k: int, rng_seed: RngLike = None, first_index: Optional[int] = None
) -> CentroidSet:
    """Random first centroid, then repeatedly the point farthest from all chosen ones."""
    points = as_points(dataset)
    n = points.shape[0]
    k = _check_k(n, k)
    rng = make_rng(rng_seed)
    chosen = [_first_index(n, rng, first_index)]
    dist = _dist_to(points, points[chosen[0]])
    available = np.ones(n, dtype=bool)
    available[chosen[0]] = False
    while len(chosen) < k:
        nxt = int(np.argmax(np.where(available, dist, -np.inf)))
        chosen.append(nxt)
        available[nxt] = False
        dist = np.minimum(dist, _dist_to(points, points[nxt]))
    return CentroidSet.from_indices(points, chosen)


def init_ckmeans(dataset: PointsLike, k: int) -> CentroidSet:
    """The ``k`` points with the smallest modified crowding distance."""
    points = as_points(dataset)
    k = _check_k(points.shape[0], k)
    crowd = crowding_modified(points).values
    order = np.argsort(crowd, kind="stable")
    return CentroidSet.from_indices(points, order[:k])


def _ratio_floor(points: np.ndarray) -> float:
    return 1e-12 * (1.0 + abs(float(points.max())))


class _RatioState:
    """Incremental distance/crowding ratios against a growing seed set."""

    def __init__(self, points: np.ndarray):
        self.points = points
        crowd = crowding_modified(points).values
        self.denominator = np.maximum(crowd, _ratio_floor(points))
        first = int(np.argmin(crowd))  # first occurrence = lowest index on ties
        self.chosen = [first]
        self.available = np.ones(points.shape[0], dtype=bool)
        self.available[first] = False
        self.min_dist = _dist_to(points, points[first])

    def ratios(self) -> np.ndarray:
        return np.where(self.available, self.min_dist / self.denominator, 0.0)

    def add(self, idx: int) -> None:
        self.chosen.append(idx)
        self.available[idx] = False
        self.min_dist = np.minimum(self.min_dist, _dist_to(self.points, self.points[idx]))


def init_fckmeans(dataset: PointsLike, k: int) -> CentroidSet:
    """Furthest crowded points.

    Starts from the most crowded point, then repeatedly adds the unselected
    point maximizing (Euclidean distance to the nearest selected seed) divided
    by its crowding distance.  The denominator is floored at
    ``1e-12 * (1 + |max entry|)`` so duplicates with zero crowding stay finite.
    """
    points = as_points(dataset)
    k = _check_k(points.shape[0], k)
    state = _RatioState(points)
    while len(state.chosen) < k:
        r = np.where(state.available, state.min_dist / state.denominator, -np.inf)
        state.add(int(np.argmax(r)))
    return CentroidSet.from_indices(points, state.chosen)


def init_rckmeans(dataset: PointsLike, k: int, rng_seed: RngLike = None) -> CentroidSet:
    """Randomized FCKmeans: seeds are drawn proportionally to the FCKmeans ratio.

    The first seed is the most crowded point, as in :func:`init_fckmeans`.
    When every remaining ratio is zero the draw falls back to uniform.
    """
    points = as_points(dataset)
    k = _check_k(points.shape[0], k)
    rng = make_rng(rng_seed)
    state = _RatioState(points)
    while len(state.chosen) < k:
        state.add(_sample_proportional(state.ratios(), state.available, rng))
    return CentroidSet.from_indices(points, state.chosen)


_STOCHASTIC: Dict[str, Callable[..., CentroidSet]] = {
    "random": init_random,
    "kmeanspp": init_kmeanspp,
    "maxmin": init_maxmin,
    "rckmeans": init_rckmeans,
}
_DETERMINISTIC: Dict[str, Callable[..., CentroidSet]] = {
    "ckmeans": init_ckmeans,
    "fckmeans": init_fckmeans,
}


def initialize(method: str, dataset: PointsLike, k: int, rng_seed: RngLike = None) -> CentroidSet:
    """Dispatch on a method identifier from :data:`METHODS`."""
    if method in _DETERMINISTIC:
        return _DETERMINISTIC[method](dataset, k)
    if method in _STOCHASTIC:
        return _STOCHASTIC[method](dataset, k, rng_seed)
    raise DataError(f"unknown init method {method!r}; expected one of {', '.join(METHODS)}")
