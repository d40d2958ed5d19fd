"""Cluster-quality measures.

Internal indices (IS, SI, DB, CH) need only the data and predicted labels;
external indices (RI, MI) compare two labelings.  Labels may use arbitrary
integer identifiers unless stated otherwise: they are compacted internally.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Dict, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .core import PointsLike, as_centers, as_points, check_dims, check_labels
from .errors import BadClusterCount, ClusteringError, IdenticalCentroids, LengthMismatch, TooFewPoints

METRIC_NAMES = ("IS", "RI", "MI", "SI", "DB", "CH")
LOWER_BETTER = frozenset({"IS", "DB"})
HIGHER_BETTER = frozenset({"RI", "MI", "SI", "CH"})
EXTERNAL = frozenset({"RI", "MI"})


def direction(metric: str) -> str:
    if metric in LOWER_BETTER:
        return "lower-better"
    if metric in HIGHER_BETTER:
        return "higher-better"
    raise KeyError(metric)


def _compact(labels: np.ndarray):
    uniq, inv = np.unique(labels, return_inverse=True)
    return inv.reshape(-1), uniq.size


def _pair_labels(truth, pred):
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    if truth.ndim != 1 or pred.ndim != 1 or truth.shape != pred.shape:
        raise LengthMismatch(f"label vectors differ in shape: {truth.shape} vs {pred.shape}")
    return truth, pred


def contingency(truth, pred) -> np.ndarray:
    """Joint count table, rows = truth clusters, columns = predicted clusters."""
    truth, pred = _pair_labels(truth, pred)
    t, kt = _compact(truth)
    p, kp = _compact(pred)
    table = np.zeros((kt, kp), dtype=np.int64)
    np.add.at(table, (t, p), 1)
    return table


def inertia(dataset: PointsLike, labels, centroids) -> float:
    """Sum of squared distances from points to their assigned centroids."""
    points = as_points(dataset)
    centers = as_centers(centroids)
    check_dims(points, centers)
    labels = check_labels(labels, points.shape[0], centers.shape[0])
    diff = points - centers[labels]
    return float(np.einsum("ij,ij->", diff, diff))


def rand_index(truth, pred) -> float:
    """Fraction of point pairs on which the two partitions agree, in [0, 1]."""
    truth, pred = _pair_labels(truth, pred)
    n = truth.shape[0]
    if n < 2:
        raise TooFewPoints("rand index needs at least 2 points")
    table = contingency(truth, pred)

    def pairs(x):
        x = np.asarray(x, dtype=np.int64)
        return int(np.sum(x * (x - 1) // 2))

    total = n * (n - 1) // 2
    same_both = pairs(table)
    same_truth = pairs(table.sum(axis=1))
    same_pred = pairs(table.sum(axis=0))
    agree = total + 2 * same_both - same_truth - same_pred
    return agree / total


def mutual_information(truth, pred) -> float:
    """Mutual information of two labelings in nats."""
    truth, pred = _pair_labels(truth, pred)
    n = truth.shape[0]
    if n == 0:
        raise TooFewPoints("mutual information needs at least 1 point")
    table = contingency(truth, pred).astype(np.float64)
    rows = table.sum(axis=1, keepdims=True)
    cols = table.sum(axis=0, keepdims=True)
    nz = table > 0
    pij = table[nz] / n
    expected = (rows @ cols)[nz] / (n * n)
    mi = float(np.sum(pij * np.log(pij / expected)))
    return max(mi, 0.0)


def _cluster_labels(points, labels, *, allow_n: bool):
    labels = check_labels(labels, points.shape[0])
    labels, k = _compact(labels)
    n = points.shape[0]
    if k < 2 or (not allow_n and k > n - 1):
        upper = "n" if allow_n else "n - 1"
        raise BadClusterCount(f"need 2 <= k <= {upper}, got k={k} for n={n}")
    return labels, k


def _means(points, labels, k):
    counts = np.bincount(labels, minlength=k)
    sums = np.column_stack(
        [np.bincount(labels, weights=points[:, j], minlength=k) for j in range(points.shape[1])]
    )
    return sums / counts[:, None], counts


def silhouette(dataset: PointsLike, labels) -> float:
    """Mean silhouette coefficient (Euclidean); singletons contribute 0."""
    points = as_points(dataset)
    labels, k = _cluster_labels(points, labels, allow_n=False)
    n = points.shape[0]
    counts = np.bincount(labels, minlength=k)
    # per-point distance sums to every cluster, evaluated in row blocks
    onehot = np.zeros((n, k))
    onehot[np.arange(n), labels] = 1.0
    sums = np.empty((n, k))
    block = max(1, 2_000_000 // n)
    for start in range(0, n, block):
        sums[start:start + block] = cdist(points[start:start + block], points) @ onehot
    own = counts[labels]
    a = np.where(own > 1, sums[np.arange(n), labels] / np.maximum(own - 1, 1), 0.0)
    mean_other = sums / counts[None, :]
    mean_other[np.arange(n), labels] = np.inf
    b = mean_other.min(axis=1)
    denom = np.maximum(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(denom > 0, (b - a) / denom, 0.0)
    s[own == 1] = 0.0
    return float(s.mean())


def davies_bouldin(dataset: PointsLike, labels) -> float:
    """Mean over clusters of the worst (s_i + s_j) / d_ij ratio.

    Raises:
        IdenticalCentroids: two distinct clusters share a centroid.
    """
    points = as_points(dataset)
    labels, k = _cluster_labels(points, labels, allow_n=True)
    centers, counts = _means(points, labels, k)
    spread = np.bincount(
        labels, weights=np.linalg.norm(points - centers[labels], axis=1), minlength=k
    ) / counts
    sep = cdist(centers, centers)
    off = ~np.eye(k, dtype=bool)
    if np.any(sep[off] == 0):
        raise IdenticalCentroids("two clusters have identical centroids")
    ratio = (spread[:, None] + spread[None, :]) / np.where(off, sep, 1.0)
    ratio[~off] = -np.inf
    return float(ratio.max(axis=1).mean())


def calinski_harabasz(dataset: PointsLike, labels) -> float:
    """Between/within dispersion ratio with (k-1, n-k) degrees of freedom.

    Returns ``inf`` when the within-cluster dispersion is zero.
    """
    points = as_points(dataset)
    labels, k = _cluster_labels(points, labels, allow_n=False)
    n = points.shape[0]
    centers, counts = _means(points, labels, k)
    grand = points.mean(axis=0)
    between = float(np.sum(counts * np.sum((centers - grand) ** 2, axis=1)))
    diff = points - centers[labels]
    within = float(np.einsum("ij,ij->", diff, diff))
    if within == 0.0:
        return float("inf")
    return (between / (k - 1)) / (within / (n - k))


@dataclass(frozen=True)
class MetricReport:
    IS: Optional[float] = None
    RI: Optional[float] = None
    MI: Optional[float] = None
    SI: Optional[float] = None
    DB: Optional[float] = None
    CH: Optional[float] = None
    # metric name -> error class name, for metrics undefined on this input
    errors: Optional[Dict[str, str]] = None

    def values(self) -> Dict[str, Optional[float]]:
        return {m: getattr(self, m) for m in METRIC_NAMES}

    def to_dict(self) -> dict:
        out = {m: v for m, v in asdict(self).items() if m != "errors" and v is not None}
        if self.errors:
            out["errors"] = dict(self.errors)
        return out


def evaluate(dataset: PointsLike, labels, centroids, truth=None, metrics=METRIC_NAMES) -> MetricReport:
    """Compute the requested metrics; undefined ones are recorded in ``errors``.

    RI and MI are skipped when ``truth`` is None.
    """
    points = as_points(dataset)
    fns = {
        "IS": lambda: inertia(points, labels, centroids),
        "RI": lambda: rand_index(truth, labels),
        "MI": lambda: mutual_information(truth, labels),
        "SI": lambda: silhouette(points, labels),
        "DB": lambda: davies_bouldin(points, labels),
        "CH": lambda: calinski_harabasz(points, labels),
    }
    values, errors = {}, {}
    for name in metrics:
        if name in EXTERNAL and truth is None:
            continue
        try:
            values[name] = float(fns[name]())
        except ClusteringError as exc:
            errors[name] = type(exc).__name__
    return MetricReport(**values, errors=errors or None)
