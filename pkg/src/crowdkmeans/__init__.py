"""Deterministic k-means seeding from a modified crowding distance."""

from .core import CentroidSet, Dataset, FeatureStats, feature_stats, standardize
from .crowding import CrowdingVector, crowding_modified, crowding_standard
from .initializers import (
    DETERMINISTIC,
    METHODS,
    init_ckmeans,
    init_fckmeans,
    init_kmeanspp,
    init_maxmin,
    init_random,
    init_rckmeans,
    initialize,
)
from .lloyd import KmeansConfig, KmeansResult, assign_points, run_kmeans, update_centroids
from .metrics import (
    METRIC_NAMES,
    MetricReport,
    calinski_harabasz,
    davies_bouldin,
    evaluate,
    inertia,
    mutual_information,
    rand_index,
    silhouette,
)

__version__ = "0.1.0"
