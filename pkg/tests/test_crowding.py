import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from crowdkmeans import crowding_modified, crowding_standard
from crowdkmeans.errors import DegenerateFeature, EmptyInput

SEVEN = np.array([0, 0.1, 0.2, 5, 5.1, 5.2, 10])


def test_standard_1d_example():
    cv = crowding_standard(np.array([0, 1, 3, 6.0]))
    assert cv.variant == "standard"
    assert np.isinf(cv.values[0]) and np.isinf(cv.values[3])
    assert cv.values[1] == pytest.approx(0.5)
    assert cv.values[2] == pytest.approx(5 / 6)


def test_standard_two_points_infinite():
    assert np.all(np.isinf(crowding_standard(np.array([[0.0, 1.0], [2.0, 3.0]])).values))


def test_standard_errors():
    with pytest.raises(EmptyInput):
        crowding_standard(np.array([[1.0, 2.0]]))
    with pytest.raises(DegenerateFeature):
        crowding_standard(np.ones((4, 2)))


def test_standard_extremes_per_feature_are_infinite():
    rng = np.random.default_rng(0)
    x = rng.uniform(size=(30, 3))
    v = crowding_standard(x).values
    for j in range(3):
        assert np.isinf(v[np.argmin(x[:, j])]) and np.isinf(v[np.argmax(x[:, j])])


def test_modified_1d_example():
    cv = crowding_modified(SEVEN)
    assert cv.variant == "modified"
    np.testing.assert_allclose(cv.values, [0.1, 0.2, 4.9, 4.9, 0.2, 4.9, 4.8], rtol=1e-12)
    # M * max(f^max) with M = 1
    assert cv.boundary == 10.0
    assert len(cv) == 7


def test_modified_2d_example():
    pts = np.array([[0, 1], [1, 0], [2, 3], [3, 2.0]])
    cv = crowding_modified(pts)
    np.testing.assert_allclose(cv.values, [1.5] * 4, rtol=1e-12)
    assert cv.boundary == 6.0


def test_modified_single_point():
    assert crowding_modified(np.array([[4.0, -2.0]])).values.tolist() == [0.0]


def test_modified_matches_oracle_on_examples():
    np.testing.assert_allclose(crowding_modified(SEVEN).values, oracles.crowding_modified(SEVEN), rtol=1e-12)


def _random_instance(rng, min_n):
    n = int(rng.integers(min_n, 65))
    d = int(rng.integers(1, 6))
    x = rng.uniform(-10, 10, size=(n, d))
    if rng.random() < 0.3:
        x = np.round(x)  # forces ties
    return x


def test_modified_random_vs_oracle():
    rng = np.random.default_rng(11)
    for _ in range(200):
        x = _random_instance(rng, 1)
        np.testing.assert_allclose(crowding_modified(x).values, oracles.crowding_modified(x), rtol=1e-9, atol=1e-12)


def test_standard_random_vs_oracle():
    rng = np.random.default_rng(12)
    for _ in range(200):
        x = _random_instance(rng, 2)
        np.testing.assert_allclose(crowding_standard(x).values, oracles.crowding_standard(x), rtol=1e-9, atol=1e-12)


distinct_rows = st.integers(2, 40).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(1, 4), st.integers(0, 2**32 - 1))
)


def _distinct(n, d, seed):
    return np.random.default_rng(seed).permutation(n * d).reshape(n, d) * 0.37 - 3.0


@settings(max_examples=60, deadline=None)
@given(distinct_rows, st.randoms(use_true_random=False))
def test_permutation_equivariance(spec, rnd):
    x = _distinct(*spec)
    perm = list(range(x.shape[0]))
    rnd.shuffle(perm)
    for fn in (crowding_modified, crowding_standard):
        np.testing.assert_allclose(fn(x[perm]).values, fn(x).values[perm], rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(distinct_rows, st.floats(-50, 50))
def test_modified_translation_invariance(spec, c):
    x = _distinct(*spec)
    np.testing.assert_allclose(crowding_modified(x + c).values, crowding_modified(x).values, rtol=1e-9, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(distinct_rows, st.floats(0.01, 100))
def test_modified_scaling(spec, c):
    x = _distinct(*spec)
    np.testing.assert_allclose(crowding_modified(c * x).values, c * crowding_modified(x).values, rtol=1e-9, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(distinct_rows)
def test_modified_values_finite_non_negative(spec):
    v = crowding_modified(_distinct(*spec)).values
    assert np.all(np.isfinite(v)) and np.all(v >= 0)
