import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qi2 import (ConfigError, DataError, MetricSpec, build_index,
                 build_index_from_matrix, distance_row, load_index,
                 neighborhood, save_index)

from conftest import make_dataset

EUCLIDEAN = MetricSpec("euclidean")


def line_dataset(values):
    values = np.asarray(values, dtype=np.float64)
    return make_dataset(values, np.zeros_like(values) + np.arange(len(values)))


def full_sort_oracle(points, metric, k_max):
    """Naive O(n^2 log n) reference: full pairwise distances, full sort per
    row with (distance, id) ordering."""
    n = points.shape[0]
    ids = np.empty((n, k_max), dtype=np.int64)
    dists = np.empty((n, k_max), dtype=np.float64)
    for i in range(n):
        d = distance_row(metric, points[i], points)
        d[i] = np.inf
        order = np.lexsort((np.arange(n), d))[:k_max]
        ids[i] = order
        dists[i] = d[order]
    return ids, dists


def test_hand_checkable_line():
    ds = line_dataset([0.0, 1.0, 10.0])
    idx = build_index(ds, EUCLIDEAN, k_max=2, workers=1)
    assert idx.neighbors[0].tolist() == [1, 2]
    assert idx.dists[0].tolist() == [1.0, 10.0]


def test_equidistant_tie_breaks_by_id():
    ds = line_dataset([0.0, -1.0, 1.0])
    idx = build_index(ds, EUCLIDEAN, k_max=2, workers=1)
    assert idx.neighbors[0].tolist() == [1, 2]


def test_index_matches_full_sort_oracle():
    rng = np.random.default_rng(17)
    ds = make_dataset(rng.standard_normal((200, 5)), rng.standard_normal(200))
    idx = build_index(ds, EUCLIDEAN, k_max=30, workers=1)
    oracle_ids, oracle_dists = full_sort_oracle(ds.inputs, EUCLIDEAN, 30)
    assert np.array_equal(idx.neighbors, oracle_ids)
    assert np.array_equal(idx.dists, oracle_dists)


def test_kmax_out_of_range():
    ds = line_dataset([0.0, 1.0, 2.0])
    with pytest.raises(ConfigError):
        build_index(ds, EUCLIDEAN, k_max=3, workers=1)
    with pytest.raises(ConfigError):
        build_index(ds, EUCLIDEAN, k_max=0, workers=1)


def test_no_self_neighbor_and_sorted_rows():
    rng = np.random.default_rng(4)
    ds = make_dataset(rng.standard_normal((60, 3)), rng.standard_normal(60))
    idx = build_index(ds, EUCLIDEAN, k_max=59, workers=1)
    for i in range(60):
        assert i not in idx.neighbors[i]
        assert np.all(np.diff(idx.dists[i]) >= 0)


def test_neighborhood_includes_anchor_first():
    ds = line_dataset([0.0, 1.0, 10.0])
    idx = build_index(ds, EUCLIDEAN, k_max=2, workers=1)
    assert neighborhood(idx, 0, 1).tolist() == [0, 1]
    assert neighborhood(idx, 0, 2).tolist() == [0, 1, 2]
    with pytest.raises(ConfigError):
        neighborhood(idx, 0, 3)
    with pytest.raises(ConfigError):
        neighborhood(idx, 0, 0)


def test_monotone_nesting():
    rng = np.random.default_rng(8)
    ds = make_dataset(rng.standard_normal((40, 2)), rng.standard_normal(40))
    idx = build_index(ds, EUCLIDEAN, k_max=39, workers=1)
    for i in range(40):
        for k in range(1, 39):
            smaller = set(neighborhood(idx, i, k).tolist())
            larger = set(neighborhood(idx, i, k + 1).tolist())
            assert smaller < larger


def test_exactness_kth_neighbor_dominates_non_neighbors():
    rng = np.random.default_rng(15)
    ds = make_dataset(rng.standard_normal((30, 2)), rng.standard_normal(30))
    k_max = 10
    idx = build_index(ds, EUCLIDEAN, k_max=k_max, workers=1)
    for i in range(30):
        d = distance_row(EUCLIDEAN, ds.inputs[i], ds.inputs)
        non_neighbors = set(range(30)) - set(idx.neighbors[i].tolist()) - {i}
        assert idx.dists[i, -1] <= min(d[j] for j in non_neighbors)


def test_parallel_workers_identical():
    rng = np.random.default_rng(23)
    ds = make_dataset(rng.standard_normal((300, 4)), rng.standard_normal(300))
    idx1 = build_index(ds, EUCLIDEAN, k_max=20, workers=1)
    idx4 = build_index(ds, EUCLIDEAN, k_max=20, workers=4)
    assert np.array_equal(idx1.neighbors, idx4.neighbors)
    assert np.array_equal(idx1.dists, idx4.dists)


def test_from_matrix_matches_build_index():
    rng = np.random.default_rng(2)
    ds = make_dataset(rng.standard_normal((12, 3)), rng.standard_normal(12))
    D = np.array([distance_row(EUCLIDEAN, ds.inputs[i], ds.inputs) for i in range(12)])
    np.fill_diagonal(D, 0.0)
    idx_m = build_index_from_matrix(D, k_max=5)
    idx_b = build_index(ds, EUCLIDEAN, k_max=5, workers=1)
    assert np.array_equal(idx_m.neighbors, idx_b.neighbors)
    assert np.array_equal(idx_m.dists, idx_b.dists)


def test_from_matrix_rejects_asymmetry_and_diagonal():
    D = np.array([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(DataError, match="asymmetric"):
        build_index_from_matrix(D, k_max=1)
    D2 = np.array([[0.5, 1.0], [1.0, 0.0]])
    with pytest.raises(DataError, match="diagonal"):
        build_index_from_matrix(D2, k_max=1)


def test_from_matrix_zero_matrix_orders_by_id():
    D = np.zeros((4, 4))
    idx = build_index_from_matrix(D, k_max=3)
    assert idx.neighbors[0].tolist() == [1, 2, 3]
    assert idx.neighbors[2].tolist() == [0, 1, 3]


def test_index_cache_round_trip(tmp_path):
    rng = np.random.default_rng(31)
    ds = make_dataset(rng.standard_normal((25, 2)), rng.standard_normal(25))
    idx = build_index(ds, EUCLIDEAN, k_max=8, workers=1)
    p = tmp_path / "index.bin"
    save_index(idx, p)
    back = load_index(p)
    assert np.array_equal(back.neighbors, idx.neighbors)
    assert np.array_equal(back.dists, idx.dists)
    assert back.metric == idx.metric
    # truncation is detected
    blob = p.read_bytes()
    p.write_bytes(blob[:-10])
    with pytest.raises(DataError, match="truncated"):
        load_index(p)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=5, max_value=25), st.integers(min_value=0, max_value=10_000))
def test_nesting_property(n, seed):
    rng = np.random.default_rng(seed)
    ds = make_dataset(rng.standard_normal((n, 2)), rng.standard_normal(n))
    k_max = n - 1
    idx = build_index(ds, EUCLIDEAN, k_max=k_max, workers=1)
    i = int(rng.integers(n))
    for k in range(1, k_max):
        assert set(neighborhood(idx, i, k)) < set(neighborhood(idx, i, k + 1))
