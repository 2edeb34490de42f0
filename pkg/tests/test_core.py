import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacki.core import (
    Dataset,
    DimensionMismatchError,
    InputMetric,
    KiConfig,
    LackiState,
    PredictionUndefinedError,
    estimate_constant_batch,
    fit,
)


# ---------------------------------------------------------------------------
# input metrics


def test_max_metric_values():
    m = InputMetric("max")
    assert m(np.array([1.0, 2.0]), np.array([4.0, 3.0])) == 3.0
    assert m(np.array([0.0]), np.array([0.0])) == 0.0


def test_euclidean_metric_values():
    m = InputMetric("euclidean")
    assert m(np.array([0.0, 0.0]), np.array([3.0, 4.0])) == pytest.approx(5.0)


def test_weighted_max_metric_values():
    m = InputMetric("weighted_max", weights=np.array([2.0, 0.5]))
    assert m(np.array([0.0, 0.0]), np.array([1.0, 4.0])) == 2.0


def test_weighted_max_requires_positive_weights():
    with pytest.raises(ValueError):
        InputMetric("weighted_max", weights=np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        InputMetric("weighted_max")
    with pytest.raises(ValueError):
        InputMetric("max", weights=np.array([1.0]))
    with pytest.raises(ValueError):
        InputMetric("cityblock")


def test_pairwise_shape():
    m = InputMetric("max")
    a = np.random.default_rng(0).normal(size=(5, 3))
    b = np.random.default_rng(1).normal(size=(7, 3))
    dist = m.pairwise(a, b)
    assert dist.shape == (5, 7)
    # brute-force oracle
    for i in range(5):
        for j in range(7):
            assert dist[i, j] == pytest.approx(np.max(np.abs(a[i] - b[j])))


@given(
    st.lists(st.floats(-10, 10), min_size=2, max_size=4),
    st.lists(st.floats(-10, 10), min_size=2, max_size=4),
    st.lists(st.floats(-10, 10), min_size=2, max_size=4),
    st.sampled_from(["max", "euclidean"]),
)
def test_metric_triangle_inequality(xs, ys, zs, kind):
    n = min(len(xs), len(ys), len(zs))
    x, y, z = (np.array(v[:n]) for v in (xs, ys, zs))
    m = InputMetric(kind)
    assert m(x, z) <= m(x, y) + m(y, z) + 1e-9


# ---------------------------------------------------------------------------
# datasets


def test_dataset_shapes_and_accessors():
    d = Dataset(np.zeros((3, 2)), np.ones((3, 4)))
    assert (d.n, d.d, d.m) == (3, 2, 4)
    e = Dataset.empty(2, 1)
    assert (e.n, e.d, e.m) == (0, 2, 1)


def test_dataset_from_pairs():
    d = Dataset.from_pairs([((0.0,), (0.0,)), ((1.0,), (1.0,))])
    assert d.n == 2 and d.d == 1 and d.m == 1


def test_dataset_length_mismatch():
    with pytest.raises(DimensionMismatchError):
        Dataset(np.zeros((3, 1)), np.zeros((2, 1)))


# ---------------------------------------------------------------------------
# constant estimation


def two_point():
    return Dataset(np.array([[0.0], [1.0]]), np.array([[0.0], [1.0]]))


def test_estimator_two_points():
    assert estimate_constant_batch(two_point(), KiConfig()) == 1.0


def test_estimator_noise_allowance():
    # allowance eats half the observed slope
    assert estimate_constant_batch(two_point(), KiConfig(lam=0.5)) == 0.5
    # allowance exceeding all increments leaves only the floor
    assert estimate_constant_batch(two_point(), KiConfig(lam=2.0, l_floor=0.25)) == 0.25


def test_estimator_floor_dominates():
    assert estimate_constant_batch(two_point(), KiConfig(l_floor=3.0)) == 3.0


def test_estimator_duplicate_inputs_ignored():
    # zero-distance pairs contribute nothing, even with conflicting outputs
    d = Dataset(np.array([[1.0], [1.0]]), np.array([[0.0], [5.0]]))
    assert estimate_constant_batch(d, KiConfig(l_floor=0.5)) == 0.5


def test_estimator_exponent():
    d = Dataset(np.array([[0.0], [0.25]]), np.array([[0.0], [1.0]]))
    assert estimate_constant_batch(d, KiConfig(alpha=0.5)) == pytest.approx(2.0)


def _brute_force_constant(data: Dataset, config: KiConfig) -> float:
    best = config.l_floor
    for i in range(data.n):
        for j in range(data.n):
            dist = config.metric(data.inputs[i], data.inputs[j])
            if dist > 0:
                dy = np.max(np.abs(data.observations[i] - data.observations[j]))
                best = max(best, (dy - config.lam) / dist**config.alpha)
    return best


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.0, 0.3, 1.0]), st.sampled_from([0.5, 1.0]))
@settings(max_examples=40, deadline=None)
def test_estimator_matches_brute_force(seed, lam, alpha):
    rng = np.random.default_rng(seed)
    n, d, m = rng.integers(1, 12), rng.integers(1, 3), rng.integers(1, 3)
    data = Dataset(rng.uniform(-1, 1, (n, d)), rng.normal(size=(n, m)))
    config = KiConfig(alpha=alpha, lam=lam, l_floor=0.1)
    assert estimate_constant_batch(data, config) == pytest.approx(
        _brute_force_constant(data, config), rel=1e-12, abs=1e-12
    )


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_incremental_equals_batch(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 30))
    data = Dataset(rng.uniform(-1, 1, (n, 2)), rng.normal(size=(n, 1)))
    config = KiConfig(lam=0.2, l_floor=0.05)
    batch = estimate_constant_batch(data, config)
    state = LackiState(config, d=2, m=1)
    i = 0
    while i < n:
        k = int(rng.integers(1, n - i + 1))
        state.add_observations(data.inputs[i : i + k], data.observations[i : i + k])
        i += k
    assert abs(state.ell - batch) <= 1e-12 * max(1.0, batch)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_estimator_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 20))
    x, y = rng.uniform(-1, 1, (n, 1)), rng.normal(size=(n, 1))
    config = KiConfig()
    perm = rng.permutation(n)
    assert estimate_constant_batch(Dataset(x, y), config) == pytest.approx(
        estimate_constant_batch(Dataset(x[perm], y[perm]), config), rel=1e-13
    )


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_constant_never_decreases(seed):
    rng = np.random.default_rng(seed)
    state = LackiState(KiConfig(l_floor=0.1), d=1, m=1)
    prev = state.ell
    for _ in range(10):
        state.add_observations(rng.uniform(-1, 1, (1, 1)), rng.normal(size=(1, 1)))
        assert state.ell >= prev
        prev = state.ell


# ---------------------------------------------------------------------------
# prediction


def test_prediction_midpoint_between_samples():
    p = fit(two_point(), KiConfig()).predict(np.array([0.5]))
    assert p.value[0] == pytest.approx(0.5)
    assert p.halfwidth[0] == pytest.approx(0.0)
    # the two envelopes meet exactly between the samples
    assert p.ceiling[0] == pytest.approx(p.floor[0])


def test_prediction_interpolates_at_samples():
    state = fit(two_point(), KiConfig())
    for x, y in [(0.0, 0.0), (1.0, 1.0)]:
        p = state.predict(np.array([x]))
        assert p.value[0] == pytest.approx(y)
        assert p.halfwidth[0] == pytest.approx(0.0)


def test_prediction_lower_bound_clipping():
    # one sample at the origin, unit constant via the floor, lower output bound 0
    data = Dataset(np.array([[0.0]]), np.array([[0.0]]))
    state = fit(data, KiConfig(l_floor=1.0, lower_bound=np.array([0.0])))
    p = state.predict(np.array([3.0]))
    assert p.floor[0] == 0.0
    assert p.ceiling[0] == pytest.approx(3.0)
    assert p.value[0] == pytest.approx(1.5)


def test_prediction_negative_halfwidth_reported():
    # an upper output bound contradicting the observation crosses the envelopes
    data = Dataset(np.array([[0.0]]), np.array([[5.0]]))
    state = fit(data, KiConfig(l_floor=1.0, upper_bound=np.array([1.0])))
    p = state.predict(np.array([0.0]))
    assert p.halfwidth[0] < 0
    assert p.value[0] == pytest.approx(3.0)


def test_prediction_empty_data_with_bounds():
    state = LackiState(
        KiConfig(lower_bound=np.array([-2.0]), upper_bound=np.array([4.0])), d=1, m=1
    )
    p = state.predict(np.array([0.0]))
    assert p.value[0] == pytest.approx(1.0)
    assert p.halfwidth[0] == pytest.approx(3.0)


def test_prediction_empty_data_unbounded_raises():
    state = LackiState(KiConfig(), d=1, m=1)
    with pytest.raises(PredictionUndefinedError):
        state.predict(np.array([0.0]))


def test_prediction_error_belief_term():
    state = fit(two_point(), KiConfig(e_bar=0.25))
    p = state.predict(np.array([0.0]))
    assert p.halfwidth[0] == pytest.approx(0.25)
    assert p.value[0] == pytest.approx(0.0)


def test_predict_dimension_mismatch():
    state = fit(two_point(), KiConfig())
    with pytest.raises(DimensionMismatchError):
        state.predict(np.array([0.0, 1.0]))
    with pytest.raises(DimensionMismatchError):
        state.add_observations(np.zeros((1, 2)), np.zeros((1, 1)))


def test_predict_rejects_nonfinite_query():
    state = fit(two_point(), KiConfig())
    with pytest.raises(ValueError):
        state.predict(np.array([math.nan]))


def test_predict_batch_empty():
    state = fit(two_point(), KiConfig())
    p = state.predict_batch(np.empty((0, 1)))
    assert p.value.shape == (0, 1)


def _brute_force_envelopes(state, x):
    radius = np.array(
        [
            state.ell * state.config.metric(x, s) ** state.config.alpha + state.config.e_bar
            for s in state.data.inputs
        ]
    )
    up = np.min(state.data.observations + radius[:, None], axis=0)
    lo = np.max(state.data.observations - radius[:, None], axis=0)
    return up, lo


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_envelopes_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 15))
    data = Dataset(rng.uniform(-1, 1, (n, 2)), rng.normal(size=(n, 2)))
    state = fit(data, KiConfig(alpha=0.7, lam=0.1, e_bar=0.05))
    for _ in range(5):
        x = rng.uniform(-2, 2, 2)
        up, lo = _brute_force_envelopes(state, x)
        p = state.predict(x)
        assert p.ceiling == pytest.approx(up)
        assert p.floor == pytest.approx(lo)
        assert p.value == pytest.approx(0.5 * (up + lo))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_predictor_is_holder(seed):
    # the predictor itself obeys the regularity it assumes
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 20))
    data = Dataset(rng.uniform(0, 1, (n, 1)), rng.normal(size=(n, 1)))
    state = fit(data, KiConfig())
    q = rng.uniform(-0.5, 1.5, (50, 1))
    vals = state.predict_batch(q).value[:, 0]
    dist = state.config.metric.pairwise(q, q)
    gaps = np.abs(vals[:, None] - vals[None, :])
    assert np.all(gaps <= state.ell * dist + 1e-9)


def test_large_batch_chunking_consistent():
    rng = np.random.default_rng(7)
    data = Dataset(rng.uniform(0, 1, (600, 1)), rng.normal(size=(600, 1)))
    state = fit(data, KiConfig())
    q = rng.uniform(0, 1, (1300, 1))
    whole = state.predict_batch(q).value
    parts = np.concatenate([state.predict_batch(qq).value for qq in np.array_split(q, 7)])
    assert np.array_equal(whole, parts)


def test_with_config_refits_constant():
    state = fit(two_point(), KiConfig())
    relaxed = state.with_config(lam=2.0, l_floor=0.1)
    assert relaxed.ell == pytest.approx(0.1)
    assert state.ell == 1.0  # original untouched


def test_config_validation():
    with pytest.raises(ValueError):
        KiConfig(alpha=0.0)
    with pytest.raises(ValueError):
        KiConfig(alpha=1.5)
    with pytest.raises(ValueError):
        KiConfig(lam=-1.0)
    with pytest.raises(ValueError):
        KiConfig(l_floor=-0.1)
    with pytest.raises(ValueError):
        KiConfig(lower_bound=np.array([1.0]), upper_bound=np.array([0.0]))
