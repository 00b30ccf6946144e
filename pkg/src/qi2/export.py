"""Result persistence and static rendering.

The result container is a self-describing binary file: a canonical JSON
header (all parameters, metric names, stabilizer values, dataset
fingerprint) followed by little-endian arrays for the local-indicator
matrix, its validity bitmask, and the heatmap grid. Saving the same
results twice produces byte-identical files.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .analysis import DetectionReport
from .core import Mlqi2Matrix, Shlqi2Grid
from .errors import DataError

CONTAINER_MAGIC = b"QI2CONT1"
FORMAT_VERSION = 1


def render_heatmap(grid: Shlqi2Grid, path, scale: int = 1) -> None:
    """8-bit grayscale PNG: k rightward, complexity upward (origin bottom
    left), one pixel per cell times an integer upscale, intensity =
    rint(value * 255)."""
    if scale < 1 or int(scale) != scale:
        raise DataError(f"scale must be a positive integer, got {scale}")
    arr = np.flipud(grid.grid)               # row 0 of the image is the top bin
    pixels = np.rint(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    if scale > 1:
        pixels = np.kron(pixels, np.ones((scale, scale), dtype=np.uint8))
    Image.fromarray(pixels, mode="L").save(path, format="PNG")


def export_report_csv(report: DetectionReport, path, labels=None) -> None:
    """One row per flagged point: id, label, trigger_k, trigger_value.

    The trigger is the first evidence entry; an empty report writes the
    header only.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label", "trigger_k", "trigger_value"])
        for ev in report.flagged:
            label = "" if labels is None else str(labels[ev.point_id])
            k, v = ev.trail[0]
            writer.writerow([ev.point_id, label, k, repr(float(v))])


@dataclass
class ResultContainer:
    matrix: Mlqi2Matrix
    grid: Shlqi2Grid
    meta: dict


def _canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def save_results(matrix: Mlqi2Matrix, grid: Shlqi2Grid, path, meta: dict) -> None:
    """Write the binary result container; `meta` must carry the dataset
    fingerprint and the parameters that produced the results."""
    n, k_max = matrix.values.shape
    valid_bits = np.packbits(matrix.valid, axis=1)
    header = dict(meta)
    header.update({
        "format_version": FORMAT_VERSION,
        "n": n,
        "k_max": k_max,
        "bins": grid.bin_count,
        "bin_min": grid.bin_min,
        "bin_width": grid.bin_width,
        "gamma": grid.gamma,
        "column_norm": grid.column_norm,
        "overflow_policy": grid.overflow_policy,
        "arrays": {
            "values": {"dtype": "<f8", "shape": [n, k_max]},
            "valid_bits": {"dtype": "u1", "shape": list(valid_bits.shape)},
            "grid": {"dtype": "<f8", "shape": [grid.bin_count, k_max]},
        },
    })
    blob = _canonical_json(header)
    with open(path, "wb") as fh:
        fh.write(CONTAINER_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(matrix.values, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(valid_bits).tobytes())
        fh.write(np.ascontiguousarray(grid.grid, dtype="<f8").tobytes())


def load_results(path, expected_fingerprint: str | None = None) -> ResultContainer:
    """Read a result container back, verifying sizes and (when given) the
    dataset fingerprint."""
    with open(path, "rb") as fh:
        magic = fh.read(len(CONTAINER_MAGIC))
        if magic != CONTAINER_MAGIC:
            raise DataError(f"{path}: not a result container")
        raw_len = fh.read(4)
        if len(raw_len) != 4:
            raise DataError(f"{path}: truncated header")
        (hlen,) = struct.unpack("<I", raw_len)
        raw_header = fh.read(hlen)
        if len(raw_header) != hlen:
            raise DataError(f"{path}: truncated header")
        header = json.loads(raw_header.decode("utf-8"))
        blobs = {}
        for name in ("values", "valid_bits", "grid"):
            spec = header["arrays"][name]
            count = int(np.prod(spec["shape"]))
            itemsize = np.dtype(spec["dtype"]).itemsize
            raw = fh.read(count * itemsize)
            if len(raw) != count * itemsize:
                raise DataError(f"{path}: truncated array {name!r}")
            blobs[name] = np.frombuffer(raw, dtype=spec["dtype"]).reshape(spec["shape"])
        if fh.read(1):
            raise DataError(f"{path}: trailing bytes after arrays")

    if expected_fingerprint is not None:
        stored = header.get("dataset_fingerprint")
        if stored != expected_fingerprint:
            raise DataError(
                f"{path}: dataset fingerprint mismatch "
                f"(container {stored}, dataset {expected_fingerprint})"
            )

    n, k_max = header["n"], header["k_max"]
    valid = np.unpackbits(blobs["valid_bits"].copy(), axis=1, count=k_max).astype(bool)
    matrix = Mlqi2Matrix(values=blobs["values"].copy(), valid=valid, k_max=k_max)
    grid = Shlqi2Grid(
        grid=blobs["grid"].copy(),
        bin_min=header["bin_min"],
        bin_width=header["bin_width"],
        bin_count=header["bins"],
        gamma=header["gamma"],
        column_norm=header["column_norm"],
        overflow_policy=header["overflow_policy"],
    )
    return ResultContainer(matrix=matrix, grid=grid, meta=header)
