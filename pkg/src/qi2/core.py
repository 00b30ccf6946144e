"""Core indicator computations.

The global indicator of a point set is the mean squared difference between
mean-normalized pairwise input distances and mean-normalized pairwise
output distances, taken over all ordered pairs including self-pairs
(|pairs| = m^2 for an m-point set). It is 0 for affine input-output
relations and grows with non-linearity.

The local form evaluates that indicator on the growing k-NN neighborhood
of every anchor (anchor included, so the size-k neighborhood holds k+1
points), incrementally in one pass per anchor. Neighborhoods that coincide
as sets with an earlier anchor's are masked so each distinct neighborhood
is histogrammed once; the per-k histogram is then column-normalized and
gamma-calibrated into the heatmap grid.

Both normalization denominators carry a weak stabilizer so that sets with
all-zero distances in one space stay finite: the stabilizer is a small
relative fraction of the global mean pairwise distance of that space,
which keeps every indicator value invariant under uniform scaling of
either space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _parallel
from .dataset import Dataset
from .errors import ConfigError
from .knn import NeighborIndex
from .metrics import MetricSpec, distance_pairs, distance_row

STABILIZER_SAMPLE_PAIRS = 100_000
STABILIZER_SEED = 0x51D2
COLUMN_NORMS = ("max", "sum")
OVERFLOW_POLICIES = ("clamp", "drop")


@dataclass(frozen=True)
class Stabilizers:
    """Absolute denominators added to the per-space distance means."""

    input_abs: float
    output_abs: float
    rel: float


@dataclass(frozen=True)
class PairSums:
    """Running sums over all ordered pairs (self-pairs included) of a subset.

    pair_count is m^2 for an m-point subset; self-pairs contribute zero to
    every sum but count toward pair_count.
    """

    s_i: float = 0.0
    s_o: float = 0.0
    s_ii: float = 0.0
    s_oo: float = 0.0
    s_io: float = 0.0
    pair_count: int = 1   # a single point has one (self) pair


@dataclass
class Mlqi2Matrix:
    """Per-anchor local indicator values for k = 1..k_max plus the dedup mask.

    values[i, k-1] is the indicator over the k-neighborhood of anchor i.
    valid[i, k-1] is False exactly when some earlier anchor j < i has the
    identical neighborhood set at the same k; masked entries are excluded
    from all downstream aggregation.
    """

    values: np.ndarray   # (n, k_max) float64
    valid: np.ndarray    # (n, k_max) bool
    k_max: int

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass
class Shlqi2Grid:
    """Column-normalized, gamma-calibrated histogram of local indicator values."""

    grid: np.ndarray     # (bin_count, k_max) float64 in [0, 1]
    bin_min: float
    bin_width: float
    bin_count: int
    gamma: float
    column_norm: str
    overflow_policy: str

    @property
    def k_max(self) -> int:
        return self.grid.shape[1]


def _mean_pairwise_distance(X: np.ndarray, metric: MetricSpec,
                            sample_pairs: int, seed: int) -> float:
    n = X.shape[0]
    if n * (n - 1) // 2 <= sample_pairs:
        total = 0.0
        count = 0
        for i in range(n - 1):
            d = distance_row(metric, X[i], X[i + 1:])
            total += float(d.sum())
            count += d.shape[0]
        return total / count
    rng = np.random.default_rng(seed)
    ii = rng.integers(0, n, size=sample_pairs)
    jj = (ii + 1 + rng.integers(0, n - 1, size=sample_pairs)) % n   # uniform over j != i
    total = 0.0
    for s in range(0, sample_pairs, 8192):
        e = min(s + 8192, sample_pairs)
        total += float(distance_pairs(metric, X[ii[s:e]], X[jj[s:e]]).sum())
    return total / sample_pairs


def compute_stabilizers(dataset: Dataset, input_metric: MetricSpec,
                        output_metric: MetricSpec, rel: float = 1e-9,
                        sample_pairs: int = STABILIZER_SAMPLE_PAIRS) -> Stabilizers:
    """Per-space stabilizers from the global mean pairwise distance.

    Means are exact when the dataset is small enough, otherwise estimated
    on a fixed seeded sample of point pairs, so results never depend on
    worker count. A space whose mean distance is zero (all points
    identical there) falls back to the relative epsilon itself.
    """
    if rel <= 0:
        raise ConfigError(f"stabilizer epsilon must be positive, got {rel}")
    mean_in = _mean_pairwise_distance(dataset.inputs, input_metric, sample_pairs, STABILIZER_SEED)
    mean_out = _mean_pairwise_distance(dataset.outputs, output_metric, sample_pairs, STABILIZER_SEED)
    return Stabilizers(
        input_abs=rel * mean_in if mean_in > 0 else rel,
        output_abs=rel * mean_out if mean_out > 0 else rel,
        rel=rel,
    )


def qi2r_direct(subset_ids, dataset: Dataset, input_metric: MetricSpec,
                output_metric: MetricSpec, stab: Stabilizers) -> float:
    """Literal indicator evaluation: build both full pair-distance matrices,
    normalize by their (stabilized) means, return the mean squared
    difference. No algebraic shortcuts; this is the oracle the incremental
    path is tested against.
    """
    ids = np.asarray(subset_ids, dtype=np.int64)
    m = ids.shape[0]
    if m < 2:
        raise ConfigError(f"subset must have at least 2 points, got {m}")
    Xin = dataset.inputs[ids]
    Xout = dataset.outputs[ids]
    DI = np.empty((m, m), dtype=np.float64)
    DO = np.empty((m, m), dtype=np.float64)
    for r in range(m):
        DI[r] = distance_row(input_metric, Xin[r], Xin)
        DO[r] = distance_row(output_metric, Xout[r], Xout)
    mean_i = DI.mean() + stab.input_abs
    mean_o = DO.mean() + stab.output_abs
    diff = DI / mean_i - DO / mean_o
    return float(np.mean(diff * diff))


def qi2r_from_sums(sums: PairSums, stab: Stabilizers) -> float:
    """Indicator from running pair sums via the expanded square.

    Equals the direct evaluation within 1e-9 relative on the same subset;
    tiny negative rounding residue is clamped to zero.
    """
    N = sums.pair_count
    mean_i = sums.s_i / N + stab.input_abs
    mean_o = sums.s_o / N + stab.output_abs
    value = (
        sums.s_ii / (N * mean_i * mean_i)
        - 2.0 * sums.s_io / (N * mean_i * mean_o)
        + sums.s_oo / (N * mean_o * mean_o)
    )
    return max(value, 0.0)


def update_sums_add_point(sums: PairSums, new_point_id: int, existing_ids,
                          dataset: Dataset, input_metric: MetricSpec,
                          output_metric: MetricSpec) -> PairSums:
    """Pair sums after adding one point to a subset.

    Every ordered pair between the new point and the existing members
    enters twice (both orders); the new self-pair adds zero to the sums
    but grows pair_count from m^2 to (m+1)^2.
    """
    existing = np.asarray(existing_ids, dtype=np.int64)
    if np.any(existing == new_point_id):
        raise ConfigError(f"point {new_point_id} is already in the subset")
    d_i = distance_row(input_metric, dataset.inputs[new_point_id], dataset.inputs[existing])
    d_o = distance_row(output_metric, dataset.outputs[new_point_id], dataset.outputs[existing])
    m = existing.shape[0]
    return PairSums(
        s_i=sums.s_i + 2.0 * float(d_i.sum()),
        s_o=sums.s_o + 2.0 * float(d_o.sum()),
        s_ii=sums.s_ii + 2.0 * float((d_i * d_i).sum()),
        s_oo=sums.s_oo + 2.0 * float((d_o * d_o).sum()),
        s_io=sums.s_io + 2.0 * float((d_i * d_o).sum()),
        pair_count=(m + 1) ** 2,
    )


def _mix64(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer; order-independent set hashes come from XOR."""
    z = x.astype(np.uint64) + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _neighborhood_fingerprints(index: NeighborIndex, k_max: int) -> np.ndarray:
    """fp[i, k-1] hashes the SET {i} + {first k neighbors of i}."""
    mixed = _mix64(index.neighbors[:, :k_max].astype(np.uint64))
    fp = np.bitwise_xor.accumulate(mixed, axis=1)
    anchor = _mix64(np.arange(index.n, dtype=np.uint64))
    return fp ^ anchor[:, None]


def _canonical_set(index: NeighborIndex, i: int, k: int) -> np.ndarray:
    return np.sort(np.concatenate(([i], index.neighbors[i, :k])).astype(np.int64))


def _dedup_mask(index: NeighborIndex, k_max: int) -> np.ndarray:
    """valid[i, k-1] = False iff some anchor j < i has the same k-set.

    Candidate duplicates are grouped by an order-independent 64-bit set
    hash; groups are confirmed by exact sorted-id comparison, so hash
    collisions between distinct sets cannot mask a live entry.
    """
    n = index.n
    fp = _neighborhood_fingerprints(index, k_max)
    valid = np.ones((n, k_max), dtype=bool)
    for c in range(k_max):
        col = fp[:, c]
        order = np.argsort(col, kind="stable")   # ascending hash, ties by anchor id
        dup_follows = col[order][1:] == col[order][:-1]
        pos = np.flatnonzero(dup_follows)
        if pos.size == 0:
            continue
        # maximal runs of equal hashes; members are in ascending anchor order
        breaks = np.flatnonzero(np.diff(pos) > 1)
        seg_starts = np.concatenate(([0], breaks + 1))
        seg_ends = np.concatenate((breaks, [pos.size - 1]))
        k = c + 1
        for s, e in zip(seg_starts, seg_ends):
            members = order[pos[s]: pos[e] + 2]
            reps: list[np.ndarray] = []
            for idx in members:
                cand = _canonical_set(index, int(idx), k)
                for rep in reps:
                    if np.array_equal(cand, rep):
                        valid[idx, c] = False
                        break
                else:
                    reps.append(cand)
    return valid


def _mlqi2_chunk(bounds):
    start, end = bounds
    inputs, outputs, neighbors, input_metric, output_metric, stab, k_max = _parallel.payload()
    eps_i, eps_o = stab.input_abs, stab.output_abs
    dims_i, dims_o = inputs.shape[1], outputs.shape[1]
    vals = np.empty((end - start, k_max), dtype=np.float64)
    sub_in = np.empty((k_max + 1, dims_i), dtype=np.float64)
    sub_out = np.empty((k_max + 1, dims_o), dtype=np.float64)
    for i in range(start, end):
        row = neighbors[i]
        sub_in[0] = inputs[i]
        sub_out[0] = outputs[i]
        s_i = s_o = s_ii = s_oo = s_io = 0.0
        out_row = vals[i - start]
        for k in range(1, k_max + 1):
            j = row[k - 1]
            new_in = inputs[j]
            new_out = outputs[j]
            d_i = distance_row(input_metric, new_in, sub_in[:k])
            d_o = distance_row(output_metric, new_out, sub_out[:k])
            s_i += 2.0 * float(d_i.sum())
            s_o += 2.0 * float(d_o.sum())
            s_ii += 2.0 * float((d_i * d_i).sum())
            s_oo += 2.0 * float((d_o * d_o).sum())
            s_io += 2.0 * float((d_i * d_o).sum())
            sub_in[k] = new_in
            sub_out[k] = new_out
            N = (k + 1) * (k + 1)
            mean_i = s_i / N + eps_i
            mean_o = s_o / N + eps_o
            v = (
                s_ii / (N * mean_i * mean_i)
                - 2.0 * s_io / (N * mean_i * mean_o)
                + s_oo / (N * mean_o * mean_o)
            )
            out_row[k - 1] = v if v > 0.0 else 0.0
    return vals


def compute_mlqi2(dataset: Dataset, index: NeighborIndex, input_metric: MetricSpec,
                  output_metric: MetricSpec, stab: Stabilizers,
                  k_max: int | None = None, workers: int | None = None) -> Mlqi2Matrix:
    """Local indicator over every anchor's growing neighborhood.

    One incremental pass per anchor (O(k_max) distance rows each); anchors
    are processed in fixed chunks so the result is byte-identical for any
    worker count.
    """
    if index.n != dataset.n:
        raise ConfigError("index and dataset disagree on point count")
    k_max = index.k_max if k_max is None else k_max
    if not 1 <= k_max <= index.k_max:
        raise ConfigError(f"k_max must be in [1, {index.k_max}], got {k_max}")
    workers = _parallel.resolve_workers(workers)
    payload = (dataset.inputs, dataset.outputs, index.neighbors,
               input_metric, output_metric, stab, k_max)
    results = _parallel.run_chunked(_mlqi2_chunk, payload, dataset.n, workers)
    values = np.vstack(results)
    valid = _dedup_mask(index, k_max)
    return Mlqi2Matrix(values=values, valid=valid, k_max=k_max)


def default_bin_width(matrix: Mlqi2Matrix, bin_count: int = 100, bin_min: float = 0.0) -> float:
    """Histogram width so bins span [bin_min, max(2.5, observed maximum)].

    Approximation-style data lives below 2.5; classification-style spikes
    extend the range to whatever was observed.
    """
    observed = matrix.values[matrix.valid]
    top = max(2.5, float(observed.max()) if observed.size else 2.5)
    return (top - bin_min) / bin_count


def compute_shlqi2(matrix: Mlqi2Matrix, bin_min: float, bin_width: float,
                   bin_count: int, gamma: float = 0.5, column_norm: str = "max",
                   overflow_policy: str = "clamp") -> Shlqi2Grid:
    """Histogram the valid local values per k, normalize per column, apply gamma.

    Bins are half-open [bin_min + v*width, bin_min + (v+1)*width); values
    beyond the top edge are clamped into the last bin or dropped according
    to overflow_policy, values below bin_min are always dropped.
    """
    if bin_width <= 0:
        raise ConfigError(f"bin_width must be positive, got {bin_width}")
    if bin_count < 1:
        raise ConfigError(f"bin_count must be >= 1, got {bin_count}")
    if gamma <= 0:
        raise ConfigError(f"gamma must be positive, got {gamma}")
    if column_norm not in COLUMN_NORMS:
        raise ConfigError(f"column_norm must be one of {COLUMN_NORMS}")
    if overflow_policy not in OVERFLOW_POLICIES:
        raise ConfigError(f"overflow_policy must be one of {OVERFLOW_POLICIES}")

    k_max = matrix.k_max
    rows, cols = np.nonzero(matrix.valid)
    vals = matrix.values[rows, cols]
    bins = np.floor((vals - bin_min) / bin_width).astype(np.int64)
    keep = bins >= 0
    if overflow_policy == "clamp":
        bins = np.minimum(bins, bin_count - 1)
    else:
        keep &= bins < bin_count
    bins = bins[keep]
    cols = cols[keep]
    counts = np.bincount(bins * k_max + cols, minlength=bin_count * k_max)
    grid = counts.reshape(bin_count, k_max).astype(np.float64)

    if column_norm == "max":
        denom = grid.max(axis=0)
    else:
        denom = grid.sum(axis=0)
    nonzero = denom > 0
    grid[:, nonzero] /= denom[nonzero]
    grid = grid ** gamma
    return Shlqi2Grid(grid=grid, bin_min=float(bin_min), bin_width=float(bin_width),
                      bin_count=int(bin_count), gamma=float(gamma),
                      column_norm=column_norm, overflow_policy=overflow_policy)
