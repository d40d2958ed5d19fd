import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from crowdkmeans import (
    calinski_harabasz,
    davies_bouldin,
    evaluate,
    inertia,
    mutual_information,
    rand_index,
    silhouette,
)
from crowdkmeans.errors import BadClusterCount, IdenticalCentroids, LengthMismatch, TooFewPoints
from crowdkmeans.metrics import direction

X = np.array([0, 1, 10, 11.0]).reshape(-1, 1)
L = np.array([0, 0, 1, 1])


def test_hand_values():
    assert rand_index([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(1 / 3, abs=1e-6)
    assert mutual_information(L, L) == pytest.approx(math.log(2), abs=1e-6)
    assert silhouette(X, L) == pytest.approx(0.8997, abs=1e-4)
    assert silhouette(X, L) == pytest.approx((9.5 / 10.5 + 8.5 / 9.5) / 2, abs=1e-12)
    assert davies_bouldin(X, L) == pytest.approx(0.1, abs=1e-6)
    assert calinski_harabasz(X, L) == pytest.approx(200.0, abs=1e-6)


def test_inertia_cases():
    assert inertia(X, [0, 1, 2, 3], X) == 0.0
    assert inertia(np.array([[0.0], [2.0]]), [0, 0], np.array([[1.0]])) == 2.0
    perm = [1, 0]
    c = np.array([[0.5], [10.5]])
    assert inertia(X, L, c) == inertia(X, 1 - L, c[perm])


def test_rand_index_cases():
    assert rand_index(L, L) == 1.0
    assert rand_index([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0
    with pytest.raises(TooFewPoints):
        rand_index([0], [0])
    with pytest.raises(LengthMismatch):
        rand_index([0, 1], [0, 1, 1])


def test_mi_cases():
    assert mutual_information(L, [3, 3, 3, 3]) == 0.0
    a, b = [0, 0, 1, 2, 2, 2], [1, 0, 0, 1, 1, 0]
    assert mutual_information(a, b) == pytest.approx(mutual_information(b, a), rel=1e-12)


def test_silhouette_cases():
    with pytest.raises(BadClusterCount):
        silhouette(X, [0, 1, 2, 3])
    with pytest.raises(BadClusterCount):
        silhouette(X, [0, 0, 0, 0])
    # two clusters at the same location: a == b == 0 for every point
    pts = np.zeros((4, 2))
    assert silhouette(pts, [0, 0, 1, 1]) == pytest.approx(0.0, abs=1e-12)


def test_silhouette_singleton_contributes_zero():
    pts = np.array([[0.0], [1.0], [50.0]])
    s = silhouette(pts, [0, 0, 1])
    assert s == pytest.approx(oracles.silhouette(pts, [0, 0, 1]), rel=1e-12)


def test_db_cases():
    assert davies_bouldin(X, [0, 1, 2, 3]) == 0.0
    assert davies_bouldin(X * 7.5, L) == pytest.approx(davies_bouldin(X, L), rel=1e-12)
    with pytest.raises(IdenticalCentroids):
        davies_bouldin(np.array([[0.0], [2.0], [0.0], [2.0]]), [0, 0, 1, 1])


def test_ch_cases():
    assert calinski_harabasz(2 * X, L) == pytest.approx(200.0, rel=1e-12)
    dup = np.array([[0.0], [0.0], [5.0], [5.0]])
    assert calinski_harabasz(dup, [0, 0, 1, 1]) == math.inf


def test_ch_random_labels_single_blob():
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.normal(size=(200, 2))
        assert calinski_harabasz(x, rng.integers(0, 3, 200)) < 10


def _instance(rng):
    n = int(rng.integers(4, 31))
    d = int(rng.integers(1, 4))
    k = int(rng.integers(2, min(4, n - 1) + 1))
    x = rng.normal(size=(n, d)) * rng.uniform(0.1, 10)
    labels = np.concatenate([np.arange(k), rng.integers(0, k, n - k)])
    rng.shuffle(labels)
    truth = rng.integers(0, int(rng.integers(1, 5)), n)
    return x, labels, truth, k


def test_metrics_match_oracles():
    rng = np.random.default_rng(42)
    for _ in range(200):
        x, labels, truth, k = _instance(rng)
        centers = np.array([x[labels == c].mean(axis=0) for c in range(k)])
        lab, tr = labels.tolist(), truth.tolist()
        assert inertia(x, labels, centers) == pytest.approx(oracles.inertia(x, lab, centers), rel=1e-9)
        assert rand_index(truth, labels) == pytest.approx(oracles.rand_index(tr, lab), rel=1e-9)
        assert mutual_information(truth, labels) == pytest.approx(oracles.mutual_information(tr, lab), rel=1e-9, abs=1e-12)
        assert silhouette(x, labels) == pytest.approx(oracles.silhouette(x, lab), rel=1e-9, abs=1e-12)
        assert davies_bouldin(x, labels) == pytest.approx(oracles.davies_bouldin(x, lab), rel=1e-9)
        assert calinski_harabasz(x, labels) == pytest.approx(oracles.calinski_harabasz(x, lab), rel=1e-9)


labelings = st.lists(st.integers(0, 4), min_size=2, max_size=40)


@settings(max_examples=100, deadline=None)
@given(labelings, st.data())
def test_external_indices_relabel_invariant_and_bounded(a, data):
    b = data.draw(st.lists(st.integers(0, 4), min_size=len(a), max_size=len(a)))
    perm = data.draw(st.permutations(range(5)))
    ri, mi = rand_index(a, b), mutual_information(a, b)
    assert 0.0 <= ri <= 1.0
    assert 0.0 <= mi <= min(oracles.entropy(a), oracles.entropy(b)) + 1e-12
    b2 = [perm[v] for v in b]
    a2 = [perm[v] for v in a]
    assert rand_index(a2, b2) == pytest.approx(ri, abs=1e-15)
    assert mutual_information(a2, b2) == pytest.approx(mi, abs=1e-12)


def test_internal_ranges():
    rng = np.random.default_rng(9)
    for _ in range(50):
        x, labels, _, _ = _instance(rng)
        assert -1 <= silhouette(x, labels) <= 1
        assert davies_bouldin(x, labels) >= 0
        assert calinski_harabasz(x, labels) >= 0


def test_evaluate_report():
    x = X
    centers = np.array([[0.5], [10.5]])
    rep = evaluate(x, L, centers, truth=L)
    assert rep.IS == 1.0 and rep.RI == 1.0 and rep.CH == pytest.approx(200.0)
    no_truth = evaluate(x, L, centers)
    assert no_truth.RI is None and no_truth.MI is None
    assert "RI" not in no_truth.to_dict()
    bad = evaluate(x, [0, 0, 0, 0], np.array([[5.5]]))
    assert bad.errors == {"SI": "BadClusterCount", "DB": "BadClusterCount", "CH": "BadClusterCount"}


def test_direction_metadata():
    assert direction("IS") == direction("DB") == "lower-better"
    assert {direction(m) for m in ("RI", "MI", "SI", "CH")} == {"higher-better"}
