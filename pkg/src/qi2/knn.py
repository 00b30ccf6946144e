"""Exact k-nearest-neighbor index over the input space.

Growing neighborhoods are read off a per-anchor row of neighbor ids sorted
by ascending input-space distance, ties broken by ascending id. The search
is exact brute force: determinism and oracle-checkability are worth more
here than an approximate index, and blocked evaluation keeps full sweeps
feasible.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from . import _parallel
from .dataset import Dataset
from .errors import ConfigError, DataError
from .metrics import MetricSpec, distance_row

INDEX_MAGIC = b"QI2KNN1\x00"
POINT_BLOCK = 4096   # bounds the (block x dims) temporary per distance sweep


@dataclass
class NeighborIndex:
    """Sorted neighbor lists (ids and input-space distances) up to k_max."""

    neighbors: np.ndarray            # (n, k_max) int32, row i sorted by distance to i
    dists: np.ndarray                # (n, k_max) float64, row-wise non-decreasing
    k_max: int
    metric: MetricSpec | None        # None when built from a precomputed matrix

    @property
    def n(self) -> int:
        return self.neighbors.shape[0]


def _anchor_distances(metric: MetricSpec, anchor: np.ndarray, points: np.ndarray) -> np.ndarray:
    n = points.shape[0]
    if n <= POINT_BLOCK:
        return distance_row(metric, anchor, points)
    out = np.empty(n, dtype=np.float64)
    for s in range(0, n, POINT_BLOCK):
        e = min(s + POINT_BLOCK, n)
        out[s:e] = distance_row(metric, anchor, points[s:e])
    return out


def _select_row(d: np.ndarray, i: int, k_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Smallest k_max entries of d (excluding index i), ties by ascending id."""
    d = d.copy()
    d[i] = np.inf
    kth = np.partition(d, k_max - 1)[k_max - 1]
    cand = np.flatnonzero(d <= kth)
    order = np.lexsort((cand, d[cand]))[:k_max]
    chosen = cand[order]
    return chosen.astype(np.int32), d[chosen]


def _index_chunk(bounds):
    start, end = bounds
    points, metric, k_max = _parallel.payload()
    ids = np.empty((end - start, k_max), dtype=np.int32)
    dists = np.empty((end - start, k_max), dtype=np.float64)
    for i in range(start, end):
        d = _anchor_distances(metric, points[i], points)
        ids[i - start], dists[i - start] = _select_row(d, i, k_max)
    return ids, dists


def build_index(dataset: Dataset, input_metric: MetricSpec, k_max: int,
                workers: int | None = None) -> NeighborIndex:
    """Exact per-anchor k-NN in the input space, deterministic for any worker count."""
    n = dataset.n
    if not 1 <= k_max <= n - 1:
        raise ConfigError(f"k_max must be in [1, {n - 1}], got {k_max}")
    workers = _parallel.resolve_workers(workers)
    results = _parallel.run_chunked(
        _index_chunk, (dataset.inputs, input_metric, k_max), n, workers
    )
    neighbors = np.vstack([r[0] for r in results])
    dists = np.vstack([r[1] for r in results])
    return NeighborIndex(neighbors=neighbors, dists=dists, k_max=k_max, metric=input_metric)


def build_index_from_matrix(dist_matrix: np.ndarray, k_max: int) -> NeighborIndex:
    """Index from an externally computed symmetric distance matrix.

    Entry point for image metrics computed by external tools; the matrix
    must be symmetric within 1e-9 with a zero diagonal.
    """
    D = np.asarray(dist_matrix, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DataError(f"distance matrix must be square, got shape {D.shape}")
    n = D.shape[0]
    if not 1 <= k_max <= n - 1:
        raise ConfigError(f"k_max must be in [1, {n - 1}], got {k_max}")
    asym = np.abs(D - D.T).max()
    if asym > 1e-9:
        raise DataError(f"distance matrix asymmetric: max |D - D^T| = {asym:g}")
    diag = np.abs(np.diag(D)).max()
    if diag > 1e-9:
        raise DataError(f"distance matrix has nonzero diagonal: max |d_ii| = {diag:g}")
    ids = np.empty((n, k_max), dtype=np.int32)
    dists = np.empty((n, k_max), dtype=np.float64)
    for i in range(n):
        ids[i], dists[i] = _select_row(D[i], i, k_max)
    return NeighborIndex(neighbors=ids, dists=dists, k_max=k_max, metric=None)


def neighborhood(index: NeighborIndex, i: int, k: int) -> np.ndarray:
    """The anchor plus its k nearest neighbors, k+1 ids in ranking order."""
    if not 1 <= k <= index.k_max:
        raise ConfigError(f"k must be in [1, {index.k_max}], got {k}")
    if not 0 <= i < index.n:
        raise ConfigError(f"anchor {i} out of range")
    return np.concatenate(([i], index.neighbors[i, :k])).astype(np.int64)


def save_index(index: NeighborIndex, path) -> None:
    """Binary cache: JSON header + little-endian id and distance arrays."""
    header = {
        "n": index.n,
        "k_max": index.k_max,
        "metric": index.metric.kind if index.metric is not None else "precomputed",
        "ids_dtype": "<i4",
        "dists_dtype": "<f8",
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(INDEX_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(index.neighbors, dtype="<i4").tobytes())
        fh.write(np.ascontiguousarray(index.dists, dtype="<f8").tobytes())


def load_index(path) -> NeighborIndex:
    with open(path, "rb") as fh:
        magic = fh.read(len(INDEX_MAGIC))
        if magic != INDEX_MAGIC:
            raise DataError(f"{path}: not a neighbor index cache")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        n, k_max = header["n"], header["k_max"]
        ids_bytes = fh.read(n * k_max * 4)
        dists_bytes = fh.read(n * k_max * 8)
        if len(ids_bytes) != n * k_max * 4 or len(dists_bytes) != n * k_max * 8:
            raise DataError(f"{path}: truncated index cache")
        if fh.read(1):
            raise DataError(f"{path}: trailing bytes in index cache")
    neighbors = np.frombuffer(ids_bytes, dtype="<i4").reshape(n, k_max).copy()
    dists = np.frombuffer(dists_bytes, dtype="<f8").reshape(n, k_max).copy()
    metric = None if header["metric"] == "precomputed" else MetricSpec(header["metric"])
    return NeighborIndex(neighbors=neighbors, dists=dists, k_max=k_max, metric=metric)
