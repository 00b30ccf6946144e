"""Dataset loading with an explicit input-space / output-space split.

A data point is one row of `points`; `input_dims` and `output_dims` name
the columns that form the predictor and target vectors. Loaders assign
stable ids by row order and reject non-finite values up front, so every
downstream stage can assume clean dense float64 data.
"""

from __future__ import annotations

import csv
import gzip
import hashlib
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


@dataclass
class Dataset:
    """Immutable dataset with a declared input/output column split."""

    points: np.ndarray                      # (n, I+O) float64
    input_dims: list[int]
    output_dims: list[int]
    labels: np.ndarray | None = None        # (n,) categorical, optional
    ids: np.ndarray = None                  # (n,) int64, assigned if omitted
    source_meta: str = ""
    image_shape: tuple[int, int] | None = None   # set for image data (thumbnails)

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=np.float64)
        if self.points.ndim != 2:
            raise DataError(f"points must be 2-D, got shape {self.points.shape}")
        n, ncols = self.points.shape
        if n < 2:
            raise DataError(f"dataset too small: need at least 2 points, got {n}")
        in_d, out_d = list(self.input_dims), list(self.output_dims)
        if not in_d or not out_d:
            raise ConfigError("input_dims and output_dims must both be non-empty")
        if set(in_d) & set(out_d):
            raise ConfigError("input_dims and output_dims must be disjoint")
        all_dims = in_d + out_d
        if len(set(all_dims)) != len(all_dims) or min(all_dims) < 0 or max(all_dims) >= ncols:
            raise ConfigError(
                f"declared dims {all_dims} do not index columns 0..{ncols - 1}"
            )
        if not np.all(np.isfinite(self.points)):
            bad = np.argwhere(~np.isfinite(self.points))[0]
            raise DataError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        if self.ids is None:
            self.ids = np.arange(n, dtype=np.int64)
        else:
            self.ids = np.asarray(self.ids, dtype=np.int64)
            if self.ids.shape != (n,):
                raise DataError("ids must have one entry per point")
        if self.labels is not None:
            self.labels = np.asarray(self.labels)
            if self.labels.shape != (n,):
                raise DataError("labels must have one entry per point")
        self.input_dims = in_d
        self.output_dims = out_d
        # contiguous views used by every hot path
        self._inputs = np.ascontiguousarray(self.points[:, in_d])
        self._outputs = np.ascontiguousarray(self.points[:, out_d])

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def inputs(self) -> np.ndarray:
        return self._inputs

    @property
    def outputs(self) -> np.ndarray:
        return self._outputs

    def fingerprint(self) -> str:
        """Content hash binding result files to the dataset they came from."""
        h = hashlib.sha256()
        h.update(struct.pack("<qqq", self.n, len(self.input_dims), len(self.output_dims)))
        h.update(np.asarray(self.input_dims, dtype=np.int64).tobytes())
        h.update(np.asarray(self.output_dims, dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(self.points, dtype="<f8").tobytes())
        if self.labels is not None:
            h.update("\x1f".join(str(v) for v in self.labels).encode("utf-8"))
        return h.hexdigest()


@dataclass
class Embedding2D:
    """Precomputed 2-D coordinates aligned to dataset ids (ingested, never computed)."""

    coords: np.ndarray   # (n, 2) float64

    def __post_init__(self):
        self.coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        if self.coords.ndim != 2 or self.coords.shape[1] != 2:
            raise DataError(f"embedding must be n x 2, got shape {self.coords.shape}")
        if not np.all(np.isfinite(self.coords)):
            raise DataError("embedding contains non-finite values")


def _parse_finite(cell: str) -> float | None:
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def _read_rows(path) -> list[list[str]]:
    try:
        with open(path, newline="") as fh:
            return [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _has_header(first_row: list[str], numeric_cols: list[int]) -> bool:
    # header is detected by any declared numeric cell failing to parse finite
    return any(
        c >= len(first_row) or _parse_finite(first_row[c]) is None
        for c in numeric_cols
    )


def load_csv(path, input_cols, output_cols, label_col=None) -> Dataset:
    """Load a comma-separated file with declared input/output column indices.

    An optional header row is auto-detected by a non-numeric first line.
    Numeric cells must parse as finite reals; the label column may hold
    arbitrary categorical values.
    """
    input_cols = list(input_cols)
    output_cols = list(output_cols)
    numeric_cols = input_cols + output_cols
    if not input_cols or not output_cols:
        raise ConfigError("input_cols and output_cols must both be non-empty")
    if set(input_cols) & set(output_cols):
        raise ConfigError("input_cols and output_cols must be disjoint")

    rows = _read_rows(path)
    if not rows:
        raise DataError(f"{path}: empty file")
    ncols = len(rows[0])
    needed = numeric_cols + ([label_col] if label_col is not None else [])
    if max(needed) >= ncols or min(needed) < 0:
        raise ConfigError(
            f"{path}: declared column {max(needed)} not present (file has {ncols} columns)"
        )
    start = 1 if _has_header(rows[0], numeric_cols) else 0
    data_rows = rows[start:]
    if len(data_rows) < 2:
        raise DataError(f"{path}: dataset too small: need at least 2 data rows")

    n = len(data_rows)
    points = np.empty((n, len(numeric_cols)), dtype=np.float64)
    labels = [] if label_col is not None else None
    for r, row in enumerate(data_rows):
        if len(row) != ncols:
            raise DataError(f"{path}: row {r + start} has {len(row)} cells, expected {ncols}")
        for j, c in enumerate(numeric_cols):
            v = _parse_finite(row[c])
            if v is None:
                raise DataError(
                    f"{path}: cannot parse {row[c]!r} as a finite number "
                    f"at row {r + start}, column {c}"
                )
            points[r, j] = v
        if labels is not None:
            labels.append(row[label_col])

    if labels is not None:
        try:
            labels = np.asarray([int(v) for v in labels], dtype=np.int64)
        except ValueError:
            labels = np.asarray(labels, dtype=object)

    return Dataset(
        points=points,
        input_dims=list(range(len(input_cols))),
        output_dims=list(range(len(input_cols), len(numeric_cols))),
        labels=labels,
        source_meta=str(path),
    )


def save_csv(dataset: Dataset, path) -> None:
    """Write the dataset back out; floats use shortest round-trip form."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"in_{i}" for i in range(len(dataset.input_dims))]
        header += [f"out_{i}" for i in range(len(dataset.output_dims))]
        if dataset.labels is not None:
            header.append("label")
        writer.writerow(header)
        cols = dataset.input_dims + dataset.output_dims
        for r in range(dataset.n):
            row = [repr(float(v)) for v in dataset.points[r, cols]]
            if dataset.labels is not None:
                row.append(str(dataset.labels[r]))
            writer.writerow(row)


def _open_maybe_gzip(path):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _read_exact(fh, count: int, path, what: str) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise DataError(f"{path}: truncated file while reading {what}")
    return data


def load_idx_mnist(images_path, labels_path) -> Dataset:
    """Load an images/labels pair in the IDX ubyte format.

    Images become 784 raw pixel input dims in [0, 255]; the digit class is
    both the single output dim (as a real scalar) and the label.
    """
    with _open_maybe_gzip(images_path) as fh:
        magic, n_images, rows, cols = struct.unpack(">IIII", _read_exact(fh, 16, images_path, "header"))
        if magic != IDX_IMAGES_MAGIC:
            raise DataError(f"{images_path}: bad magic 0x{magic:08x}, expected 0x{IDX_IMAGES_MAGIC:08x}")
        raw = _read_exact(fh, n_images * rows * cols, images_path, "pixel data")
        if fh.read(1):
            raise DataError(f"{images_path}: trailing bytes after pixel data")
    with _open_maybe_gzip(labels_path) as fh:
        magic, n_labels = struct.unpack(">II", _read_exact(fh, 8, labels_path, "header"))
        if magic != IDX_LABELS_MAGIC:
            raise DataError(f"{labels_path}: bad magic 0x{magic:08x}, expected 0x{IDX_LABELS_MAGIC:08x}")
        raw_labels = _read_exact(fh, n_labels, labels_path, "label data")
        if fh.read(1):
            raise DataError(f"{labels_path}: trailing bytes after label data")
    if n_images != n_labels:
        raise DataError(
            f"image/label count mismatch: {n_images} images vs {n_labels} labels"
        )

    pixels = np.frombuffer(raw, dtype=np.uint8).reshape(n_images, rows * cols)
    digits = np.frombuffer(raw_labels, dtype=np.uint8)
    points = np.empty((n_images, rows * cols + 1), dtype=np.float64)
    points[:, :-1] = pixels
    points[:, -1] = digits
    return Dataset(
        points=points,
        input_dims=list(range(rows * cols)),
        output_dims=[rows * cols],
        labels=digits.astype(np.int64),
        source_meta=f"{images_path}+{labels_path}",
        image_shape=(rows, cols),
    )


def load_embedding(path, dataset: Dataset) -> Embedding2D:
    """Load a 2-column (x, y) or 3-column (id, x, y) coordinate file."""
    rows = _read_rows(path)
    if not rows:
        raise DataError(f"{path}: empty file")
    width = len(rows[0])
    if width not in (2, 3):
        raise DataError(f"{path}: expected 2 or 3 columns, got {width}")
    if _has_header(rows[0], list(range(width))):
        rows = rows[1:]
    if len(rows) != dataset.n:
        raise DataError(
            f"{path}: embedding has {len(rows)} rows but dataset has {dataset.n} points"
        )
    coords = np.empty((dataset.n, 2), dtype=np.float64)
    if width == 2:
        for r, row in enumerate(rows):
            x, y = _parse_finite(row[0]), _parse_finite(row[1])
            if x is None or y is None:
                raise DataError(f"{path}: non-numeric coordinate at row {r}")
            coords[r] = (x, y)
    else:
        seen = np.zeros(dataset.n, dtype=bool)
        for r, row in enumerate(rows):
            try:
                pid = int(row[0])
            except ValueError:
                raise DataError(f"{path}: non-integer id at row {r}") from None
            if not 0 <= pid < dataset.n or seen[pid]:
                raise DataError(f"{path}: id {pid} at row {r} is out of range or repeated")
            x, y = _parse_finite(row[1]), _parse_finite(row[2])
            if x is None or y is None:
                raise DataError(f"{path}: non-numeric coordinate at row {r}")
            seen[pid] = True
            coords[pid] = (x, y)
    return Embedding2D(coords=coords)
