"""Global statistics and trajectory-based detectors.

Each detector is a parameterized query over per-anchor indicator
trajectories. The thresholds are deliberate design choices exposed in
DetectorConfig, calibrated on synthetic constructions:

- homogeneous clusters: trajectories that never leave the (1, 2) band over
  a k-range (single-class neighborhoods with stabilized normalization sit
  there, near pi/2 for 1-D inputs).
- out-of-distribution points: trajectories strictly above the running
  characteristic of the homogeneous population but below 2, with no
  cross-class contact among the examined neighbors.
- outliers (classification): near-zero value at k=1 (nearest neighbor has
  another class) combined with a steep local spike; class boundaries fail
  the spike test because balanced neighborhoods keep values low.
- simple subsets: persistently low values over consecutive k.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import _parallel
from .core import Mlqi2Matrix, PairSums, Stabilizers, qi2r_from_sums
from .dataset import Dataset
from .errors import ConfigError, DataError
from .knn import NeighborIndex
from .metrics import MetricSpec, distance_row


@dataclass(frozen=True)
class DetectorConfig:
    homog_band: tuple[float, float] = (1.0, 2.0)
    homog_k_range: tuple[int, int] = (10, 300)
    ood_band: tuple[float | None, float] = (None, 2.0)   # None lower edge: use the running characteristic
    ood_char_percentile: float = 90.0
    outlier_k1_max: float = 0.5
    outlier_rise_k_range: tuple[int, int] = (5, 25)
    outlier_spike_min: float = 10.0
    simple_low_max: float = 0.3
    simple_persistence: int = 20

    def __post_init__(self):
        if self.homog_band[0] >= self.homog_band[1]:
            raise ConfigError("homog_band must be a non-empty interval")
        if self.homog_k_range[0] > self.homog_k_range[1] or self.homog_k_range[0] < 1:
            raise ConfigError("homog_k_range must be a non-empty interval of k >= 1")
        if self.ood_band[0] is not None and self.ood_band[0] >= self.ood_band[1]:
            raise ConfigError("ood_band must be a non-empty interval")
        if self.outlier_rise_k_range[0] > self.outlier_rise_k_range[1] or self.outlier_rise_k_range[0] < 1:
            raise ConfigError("outlier_rise_k_range must be a non-empty interval of k >= 1")
        for name in ("outlier_k1_max", "outlier_spike_min", "simple_low_max"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.simple_persistence < 1:
            raise ConfigError("simple_persistence must be >= 1")
        if not 0 < self.ood_char_percentile <= 100:
            raise ConfigError("ood_char_percentile must be in (0, 100]")


@dataclass
class Evidence:
    point_id: int
    trail: list[tuple[int, float]]   # (k, value) pairs that triggered the flag


@dataclass
class DetectionReport:
    detector: str
    config: dict
    flagged: list[Evidence]

    def ids(self) -> list[int]:
        return [e.point_id for e in self.flagged]

    def to_json_dict(self) -> dict:
        return {
            "detector": self.detector,
            "config": self.config,
            "flagged": [
                {"id": e.point_id, "evidence": [[int(k), float(v)] for k, v in e.trail]}
                for e in self.flagged
            ],
        }


def _config_dict(config: DetectorConfig) -> dict:
    # canonical JSON form: tuples become lists
    return {k: list(v) if isinstance(v, tuple) else v
            for k, v in asdict(config).items()}


def _clip_k_range(k_range: tuple[int, int], k_max: int, what: str) -> tuple[int, int]:
    lo, hi = max(1, k_range[0]), min(k_max, k_range[1])
    if lo > hi:
        raise ConfigError(f"{what} {k_range} does not intersect available k in [1, {k_max}]")
    return lo, hi


def _global_sums_chunk(bounds):
    start, end = bounds
    inputs, outputs, input_metric, output_metric = _parallel.payload()
    s = np.zeros(5, dtype=np.float64)
    for i in range(start, end):
        d_i = distance_row(input_metric, inputs[i], inputs)
        d_o = distance_row(output_metric, outputs[i], outputs)
        s[0] += float(d_i.sum())
        s[1] += float(d_o.sum())
        s[2] += float((d_i * d_i).sum())
        s[3] += float((d_o * d_o).sum())
        s[4] += float((d_i * d_o).sum())
    return s


def global_qi2r(dataset: Dataset, input_metric: MetricSpec, output_metric: MetricSpec,
                stab: Stabilizers, workers: int | None = None) -> float:
    """Whole-dataset indicator via blocked pair-sum accumulation.

    Sweeping every anchor's full distance row visits each ordered pair
    exactly once; chunk partials are reduced in fixed order so the result
    does not depend on the worker count.
    """
    n = dataset.n
    workers = _parallel.resolve_workers(workers)
    payload = (dataset.inputs, dataset.outputs, input_metric, output_metric)
    partials = _parallel.run_chunked(_global_sums_chunk, payload, n, workers)
    s = np.sum(np.vstack(partials), axis=0)
    sums = PairSums(s_i=s[0], s_o=s[1], s_ii=s[2], s_oo=s[3], s_io=s[4], pair_count=n * n)
    return qi2r_from_sums(sums, stab)


@dataclass
class DistributionSummary:
    bin_edges: np.ndarray     # (bins+1,)
    density: np.ndarray       # (bins,), integrates to 1
    values_sorted: np.ndarray
    cdf: np.ndarray           # empirical CDF at values_sorted, ends at 1


def qi2r_distribution(matrix: Mlqi2Matrix, k: int, bins: int = 50) -> DistributionSummary:
    """Empirical density and CDF of the valid local values at one k."""
    if not 1 <= k <= matrix.k_max:
        raise ConfigError(f"k must be in [1, {matrix.k_max}], got {k}")
    col = matrix.values[:, k - 1][matrix.valid[:, k - 1]]
    if col.size == 0:
        raise DataError(f"no valid entries at k={k}")
    density, edges = np.histogram(col, bins=bins, density=True)
    values_sorted = np.sort(col)
    cdf = np.arange(1, col.size + 1, dtype=np.float64) / col.size
    return DistributionSummary(bin_edges=edges, density=density,
                               values_sorted=values_sorted, cdf=cdf)


def _raw_trail(matrix: Mlqi2Matrix, i: int, lo_k: int, hi_k: int) -> list[tuple[int, float]]:
    return [
        (int(k), float(matrix.values[i, k - 1]))
        for k in range(lo_k, hi_k + 1)
    ]


def detect_homogeneous(matrix: Mlqi2Matrix, config: DetectorConfig) -> DetectionReport:
    """Points whose trajectory stays inside the homogeneous band throughout
    the configured k-range.

    Detectors read raw trajectories: a masked duplicate entry carries the
    same value as its representative, so masking (a histogram-counting
    concern) never disqualifies a point.
    """
    lo_k, hi_k = _clip_k_range(config.homog_k_range, matrix.k_max, "homog_k_range")
    lo_v, hi_v = config.homog_band
    seg = matrix.values[:, lo_k - 1: hi_k]
    flagged_mask = ((seg > lo_v) & (seg < hi_v)).all(axis=1)
    flagged = [
        Evidence(point_id=int(i), trail=_raw_trail(matrix, int(i), lo_k, hi_k))
        for i in np.flatnonzero(flagged_mask)
    ]
    return DetectionReport("homogeneous", _config_dict(config), flagged)


def homogeneous_characteristic(matrix: Mlqi2Matrix, config: DetectorConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-k percentile of the homogeneous-flagged trajectories over the
    configured range: the running upper edge of the homogeneous population.

    Raw trajectories are used here (a masked duplicate has the same value
    as its representative); the mask only dedups histogram counting.
    """
    lo_k, hi_k = _clip_k_range(config.homog_k_range, matrix.k_max, "homog_k_range")
    homog_ids = np.asarray(detect_homogeneous(matrix, config).ids(), dtype=np.int64)
    ks = np.arange(lo_k, hi_k + 1)
    char = np.full(ks.shape, np.inf)
    if homog_ids.size:
        seg = matrix.values[homog_ids, lo_k - 1: hi_k]
        char = np.percentile(seg, config.ood_char_percentile, axis=0)
    return ks, char


def detect_ood(matrix: Mlqi2Matrix, labels, index: NeighborIndex,
               config: DetectorConfig) -> DetectionReport:
    """Points sitting above the homogeneous characteristic but below the
    upper edge over the whole examined k-range, whose neighbors in that
    range all share the point's class (displaced from their cluster
    without touching another class)."""
    if labels is None:
        raise ConfigError("out-of-distribution detection requires labels")
    labels = np.asarray(labels)
    lo_k, hi_k = _clip_k_range(config.homog_k_range, matrix.k_max, "homog_k_range")
    ks, char = homogeneous_characteristic(matrix, config)
    lower_fixed, upper = config.ood_band
    lower = np.full(ks.shape, lower_fixed, dtype=np.float64) if lower_fixed is not None else char

    seg = matrix.values[:, lo_k - 1: hi_k]
    candidate = ((seg > lower[None, :]) & (seg < upper)).all(axis=1)
    same_class = (labels[index.neighbors[:, :hi_k]] == labels[:, None]).all(axis=1)
    flagged = [
        Evidence(point_id=int(i),
                 trail=[(int(k), float(v)) for k, v in zip(ks, seg[i])])
        for i in np.flatnonzero(candidate & same_class)
    ]
    return DetectionReport("ood", _config_dict(config), flagged)


def detect_outliers(matrix: Mlqi2Matrix, labels, index: NeighborIndex,
                    config: DetectorConfig) -> DetectionReport:
    """Classification outliers: low value at k=1 (nearest neighbor carries
    another class) plus a steep spike inside the local rise range."""
    if labels is None:
        raise ConfigError("outlier detection requires labels")
    lo_k, hi_k = _clip_k_range(config.outlier_rise_k_range, matrix.k_max, "outlier_rise_k_range")
    v1 = matrix.values[:, 0]
    rise_seg = matrix.values[:, lo_k - 1: hi_k]
    spike = rise_seg.max(axis=1)
    spike_k = lo_k + rise_seg.argmax(axis=1)
    flagged_mask = (v1 <= config.outlier_k1_max) & (spike >= config.outlier_spike_min)
    flagged = [
        Evidence(point_id=int(i),
                 trail=[(1, float(v1[i])), (int(spike_k[i]), float(spike[i]))])
        for i in np.flatnonzero(flagged_mask)
    ]
    return DetectionReport("outliers", _config_dict(config), flagged)


def detect_simple_subsets(matrix: Mlqi2Matrix, config: DetectorConfig) -> DetectionReport:
    """Points with a long enough consecutive run of low local values."""
    low = matrix.values <= config.simple_low_max
    need = config.simple_persistence
    flagged = []
    for i in range(matrix.n):
        row = low[i]
        if not row.any():
            continue
        padded = np.concatenate(([False], row, [False]))
        edges = np.diff(padded.astype(np.int8))
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1)
        lengths = ends - starts
        best = int(lengths.argmax())
        if lengths[best] >= need:
            s, e = int(starts[best]), int(ends[best])
            trail = [(k + 1, float(matrix.values[i, k])) for k in range(s, e)]
            flagged.append(Evidence(point_id=i, trail=trail))
    return DetectionReport("simple-subsets", _config_dict(config), flagged)


def homogeneous_cluster_counts(labels, index: NeighborIndex, k_list) -> list[tuple[int, int]]:
    """For each k, how many points have all of their k nearest neighbors
    carrying the point's own label. Pure neighbor/label computation,
    independent of indicator values."""
    if labels is None:
        raise ConfigError("cluster counts require labels")
    labels = np.asarray(labels)
    out = []
    for k in k_list:
        k = int(k)
        if not 1 <= k <= index.k_max:
            raise ConfigError(f"k={k} outside index range [1, {index.k_max}]")
        same = (labels[index.neighbors[:, :k]] == labels[:, None]).all(axis=1)
        out.append((k, int(same.sum())))
    return out


def select_region(matrix: Mlqi2Matrix, k_range: tuple[int, int],
                  value_range: tuple[float, float]) -> np.ndarray:
    """Ids whose trajectory has at least one valid entry inside the
    rectangle (inclusive ranges) — the inverse map from heatmap regions to
    data points."""
    k_lo, k_hi = k_range
    v_lo, v_hi = value_range
    if k_lo > k_hi:
        raise ConfigError(f"inverted k_range {k_range}")
    if v_lo > v_hi:
        raise ConfigError(f"inverted value_range {value_range}")
    k_lo = max(1, int(k_lo))
    k_hi = min(matrix.k_max, int(k_hi))
    if k_lo > k_hi:
        return np.empty(0, dtype=np.int64)
    seg = matrix.values[:, k_lo - 1: k_hi]
    ok = matrix.valid[:, k_lo - 1: k_hi]
    hit = (ok & (seg >= v_lo) & (seg <= v_hi)).any(axis=1)
    return np.flatnonzero(hit).astype(np.int64)
