"""Shared fixtures: synthetic datasets with known structure.

Every fixture is seeded and was validated against the literal
pair-enumeration oracle before the incremental path existed; tests assert
against constructions, never against eyeballed numbers.
"""

import numpy as np
import pytest

from qi2 import Dataset, MetricSpec, build_index, compute_stabilizers


def make_dataset(x, y, labels=None):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if y.ndim == 1:
        y = y[:, None]
    return Dataset(points=np.hstack([x, y]),
                   input_dims=list(range(x.shape[1])),
                   output_dims=list(range(x.shape[1], x.shape[1] + y.shape[1])),
                   labels=labels)


@pytest.fixture(scope="session")
def four_point_dataset():
    # 1-D in / 1-D out: {(0,0), (1,1), (2,0), (3,1)}; indicator = 1.2 by
    # exhaustive enumeration of all 16 ordered pairs (frozen oracle value)
    return make_dataset([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 0.0, 1.0])


@pytest.fixture(scope="session")
def two_blob_dataset():
    # two far-separated 1-D uniform blobs, one class per blob: within
    # k <= 59 every neighborhood is single-class, so output distances
    # vanish and trajectories sit in the homogeneous band
    rng = np.random.default_rng(42)
    x = np.concatenate([rng.uniform(0.0, 10.0, 60), rng.uniform(1000.0, 1010.0, 60)])
    labels = np.array([0] * 60 + [1] * 60)
    return make_dataset(x, labels.astype(np.float64), labels=labels)


@pytest.fixture(scope="session")
def outlier_blob_dataset():
    # two-class 1-D blobs plus one point planted inside the far blob but
    # labeled with the near blob's class; the planted point is nobody's
    # nearest neighbor (verified at construction)
    rng = np.random.default_rng(7)
    xa = rng.uniform(0.0, 10.0, 50)
    xb = rng.uniform(100.0, 110.0, 50)
    x = np.concatenate([xa, xb, [105.03]])
    labels = np.array([0] * 50 + [1] * 50 + [0])
    ds = make_dataset(x, labels.astype(np.float64), labels=labels)
    index = build_index(ds, MetricSpec("euclidean"), k_max=40, workers=1)
    assert not np.any(index.neighbors[:, 0] == 100), "fixture broken: planted point is a nearest neighbor"
    return ds


@pytest.fixture(scope="session")
def ood_blob_dataset():
    # two 2-D single-class blobs plus one same-class point displaced from
    # its blob without approaching the other blob
    rng = np.random.default_rng(3)
    a = rng.uniform(0.0, 10.0, (60, 2))
    b = rng.uniform(1000.0, 1010.0, (60, 2))
    p = np.array([[15.0, 15.0]])
    pts = np.vstack([a, b, p])
    labels = np.array([0] * 60 + [1] * 60 + [0])
    return make_dataset(pts, labels.astype(np.float64), labels=labels)


@pytest.fixture(scope="session")
def noisy_sine_dataset():
    # left half: clean sine (locally simple); right half: sine plus heavy
    # uniform noise (no usable input-output relation)
    rng = np.random.default_rng(11)
    x = np.sort(rng.uniform(0.0, 20.0, 300))
    y = np.sin(x)
    noisy = x > 10.0
    y[noisy] = y[noisy] + rng.uniform(-2.0, 2.0, noisy.sum())
    ds = make_dataset(x, y)
    ds.sine_ids = np.flatnonzero(~noisy)   # fixture metadata for assertions
    ds.noise_ids = np.flatnonzero(noisy)
    return ds


@pytest.fixture(scope="session")
def spike_blob_dataset():
    # two moderately separated 1-D gaussian blobs: the first other-class
    # neighbor enters at k=50 and the trajectory jumps there
    rng = np.random.default_rng(0)
    x = np.concatenate([rng.normal(0.0, 1.0, 50), rng.normal(6.0, 1.0, 50)])
    labels = np.array([0] * 50 + [1] * 50)
    return make_dataset(x, labels.astype(np.float64), labels=labels)


def standard_setup(dataset, output_metric="euclidean", k_max=None, rel=1e-9):
    """(metrics, stabilizers, index) for a fixture dataset."""
    mi = MetricSpec("euclidean")
    mo = MetricSpec(output_metric)
    stab = compute_stabilizers(dataset, mi, mo, rel=rel)
    if k_max is None:
        k_max = dataset.n - 1
    index = build_index(dataset, mi, k_max, workers=1)
    return mi, mo, stab, index
