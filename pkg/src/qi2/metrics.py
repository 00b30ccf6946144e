"""Pairwise distance metrics for input and output spaces.

Input and output spaces are independently configurable; each metric is a
pure function of two vectors. `distance_row` is the blocked form used by
the neighbor search and the local-indicator sweep; `distance` is defined
as the single-row special case so scalar and blocked calls can never
disagree.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

METRIC_KINDS = ("euclidean", "squared_euclidean", "cosine", "discrete")


@dataclass(frozen=True)
class MetricSpec:
    """Named pairwise metric.

    cosine is computed as half the squared euclidean distance between
    unit-normalized vectors, which equals 1 - cos(a, b) algebraically and
    returns exactly 0.0 for bit-identical inputs. discrete is 0 iff the
    vectors are element-wise equal, else 1.
    """

    kind: str = "euclidean"

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise ConfigError(
                f"unknown metric {self.kind!r}; expected one of {METRIC_KINDS}"
            )


def distance_row(spec: MetricSpec, anchor: np.ndarray, block: np.ndarray) -> np.ndarray:
    """Distances from `anchor` to every row of `block`.

    Element i equals distance(spec, anchor, block[i]) bit-for-bit: each row
    is reduced independently, so blocking never changes results.
    """
    anchor = np.asarray(anchor, dtype=np.float64)
    block = np.asarray(block, dtype=np.float64)
    if anchor.ndim != 1:
        raise ConfigError(f"anchor must be 1-D, got shape {anchor.shape}")
    if block.ndim != 2:
        raise ConfigError(f"block must be 2-D, got shape {block.shape}")
    if block.shape[1] != anchor.shape[0]:
        raise ConfigError(
            f"dimension mismatch: anchor has {anchor.shape[0]} dims, "
            f"block rows have {block.shape[1]}"
        )
    if block.shape[0] == 0:
        return np.empty(0, dtype=np.float64)

    if spec.kind == "euclidean":
        diff = block - anchor
        return np.sqrt(np.sum(diff * diff, axis=1))
    if spec.kind == "squared_euclidean":
        diff = block - anchor
        return np.sum(diff * diff, axis=1)
    if spec.kind == "cosine":
        anchor_norm = np.sqrt(np.sum(anchor * anchor))
        if anchor_norm == 0.0:
            raise ConfigError("cosine distance is undefined for a zero vector")
        block_norms = np.sqrt(np.sum(block * block, axis=1))
        if np.any(block_norms == 0.0):
            raise ConfigError("cosine distance is undefined for a zero vector")
        diff = block / block_norms[:, None] - anchor / anchor_norm
        return 0.5 * np.sum(diff * diff, axis=1)
    # discrete
    return np.any(block != anchor, axis=1).astype(np.float64)


def distance(spec: MetricSpec, a: np.ndarray, b: np.ndarray) -> float:
    """Distance between two vectors under `spec`."""
    b = np.asarray(b, dtype=np.float64)
    return float(distance_row(spec, a, b[None, :])[0])


def distance_pairs(spec: MetricSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances between corresponding rows of two equal-shape matrices."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2:
        raise ConfigError(f"paired matrices must share a 2-D shape, got {a.shape} vs {b.shape}")
    if spec.kind == "euclidean":
        diff = a - b
        return np.sqrt(np.sum(diff * diff, axis=1))
    if spec.kind == "squared_euclidean":
        diff = a - b
        return np.sum(diff * diff, axis=1)
    if spec.kind == "cosine":
        na = np.sqrt(np.sum(a * a, axis=1))
        nb = np.sqrt(np.sum(b * b, axis=1))
        if np.any(na == 0.0) or np.any(nb == 0.0):
            raise ConfigError("cosine distance is undefined for a zero vector")
        diff = a / na[:, None] - b / nb[:, None]
        return 0.5 * np.sum(diff * diff, axis=1)
    return np.any(a != b, axis=1).astype(np.float64)
