"""Read-only HTTP API for the workbench UI.

All endpoints are pure functions of the loaded container plus the query;
state is immutable after load, so concurrent requests need no locking.
The heatmap grid travels as raw little-endian float64 (or base64 inside
JSON) rather than JSON arrays: a 100 x 3000 grid is 2.4 MB of floats that
the browser decodes in one typed-array view.
"""

from __future__ import annotations

import base64
import io
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse
from PIL import Image

from . import analysis
from .dataset import Dataset, Embedding2D
from .errors import ConfigError
from .export import ResultContainer
from .knn import NeighborIndex

DETECTOR_NAMES = ("outliers", "homogeneous", "ood", "simple-subsets")
_FLOAT_FIELDS = ("outlier_k1_max", "outlier_spike_min", "simple_low_max", "ood_char_percentile")
_INT_FIELDS = ("simple_persistence",)
_RANGE_FIELDS = {
    "homog_k_lo": ("homog_k_range", 0, int), "homog_k_hi": ("homog_k_range", 1, int),
    "homog_v_lo": ("homog_band", 0, float), "homog_v_hi": ("homog_band", 1, float),
    "rise_k_lo": ("outlier_rise_k_range", 0, int), "rise_k_hi": ("outlier_rise_k_range", 1, int),
}


@dataclass
class AppState:
    container: ResultContainer | None = None
    dataset: Dataset | None = None
    embedding: Embedding2D | None = None
    index: NeighborIndex | None = None
    select_cap: int = 10_000


def _thumbnail_png_b64(vec: np.ndarray, shape: tuple[int, int]) -> str:
    img = np.clip(vec.reshape(shape), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(img, mode="L").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _parse_detector_config(params) -> analysis.DetectorConfig:
    kwargs: dict = {}
    ranges: dict = {}
    base = analysis.DetectorConfig()
    for key, raw in params.items():
        try:
            if key in _FLOAT_FIELDS:
                kwargs[key] = float(raw)
            elif key in _INT_FIELDS:
                kwargs[key] = int(raw)
            elif key in _RANGE_FIELDS:
                field, pos, cast = _RANGE_FIELDS[key]
                pair = list(ranges.get(field) or getattr(base, field))
                pair[pos] = cast(raw)
                ranges[field] = tuple(pair)
            else:
                raise HTTPException(400, f"unknown config parameter {key!r}")
        except (TypeError, ValueError):
            raise HTTPException(400, f"cannot parse {key}={raw!r}") from None
    kwargs.update(ranges)
    try:
        return analysis.DetectorConfig(**kwargs)
    except ConfigError as exc:
        raise HTTPException(400, str(exc)) from None


def create_app(container: ResultContainer | None = None, dataset: Dataset | None = None,
               embedding: Embedding2D | None = None, index: NeighborIndex | None = None,
               select_cap: int = 10_000, static_dir=None) -> FastAPI:
    app = FastAPI(title="qi2 workbench API")
    state = AppState(container=container, dataset=dataset, embedding=embedding,
                     index=index, select_cap=select_cap)
    app.state.qi2 = state

    def loaded() -> AppState:
        if state.container is None or state.dataset is None:
            raise HTTPException(503, "no result container loaded")
        return state

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/meta")
    def meta():
        st = loaded()
        m = st.container.meta
        grid = st.container.grid
        return {
            "n": m["n"],
            "k_max": m["k_max"],
            "bins": grid.bin_count,
            "bin_min": grid.bin_min,
            "bin_width": grid.bin_width,
            "gamma": grid.gamma,
            "metrics": {"input": m.get("input_metric"), "output": m.get("output_metric")},
            "has_labels": st.dataset.labels is not None,
            "has_embedding": st.embedding is not None,
        }

    @app.get("/api/shlqi2")
    def shlqi2(request: Request):
        st = loaded()
        grid = st.container.grid
        accept = request.headers.get("accept", "*/*")
        raw = np.ascontiguousarray(grid.grid, dtype="<f8").tobytes()
        if "application/octet-stream" in accept:
            return Response(
                content=raw,
                media_type="application/octet-stream",
                headers={"X-Bins": str(grid.bin_count), "X-K-Max": str(grid.k_max)},
            )
        if "application/json" in accept or "*/*" in accept or "application/*" in accept:
            return {
                "bins": grid.bin_count,
                "k_max": grid.k_max,
                "bin_min": grid.bin_min,
                "bin_width": grid.bin_width,
                "gamma": grid.gamma,
                "dtype": "<f8",
                "order": "row-major bins x k",
                "data_b64": base64.b64encode(raw).decode("ascii"),
            }
        raise HTTPException(406, f"cannot satisfy Accept: {accept}")

    @app.post("/api/select")
    def select(body: dict):
        st = loaded()
        try:
            k_min, k_max = int(body["k_min"]), int(body["k_max"])
            v_min, v_max = float(body["v_min"]), float(body["v_max"])
        except (KeyError, TypeError, ValueError):
            raise HTTPException(400, "body must carry numeric k_min, k_max, v_min, v_max") from None
        try:
            ids = analysis.select_region(st.container.matrix, (k_min, k_max), (v_min, v_max))
        except ConfigError as exc:
            raise HTTPException(400, str(exc)) from None
        truncated = ids.size > st.select_cap
        if truncated:
            ids = ids[: st.select_cap]
        return {"ids": [int(i) for i in ids], "count": int(ids.size), "truncated": truncated}

    @app.get("/api/point/{point_id}")
    def point(point_id: int):
        st = loaded()
        ds = st.dataset
        if not 0 <= point_id < ds.n:
            raise HTTPException(404, f"point {point_id} out of range")
        matrix = st.container.matrix
        ok = matrix.valid[point_id]
        ks = np.flatnonzero(ok) + 1
        trajectory = [[int(k), float(matrix.values[point_id, k - 1])] for k in ks]
        payload = {
            "id": point_id,
            "label": None if ds.labels is None else _json_label(ds.labels[point_id]),
            "output_values": [float(v) for v in ds.outputs[point_id]],
            "trajectory": trajectory,
        }
        if ds.image_shape is not None:
            payload["input_preview"] = _thumbnail_png_b64(ds.inputs[point_id], ds.image_shape)
        else:
            payload["input_values"] = [float(v) for v in ds.inputs[point_id]]
        if st.embedding is not None:
            payload["embedding_xy"] = [float(v) for v in st.embedding.coords[point_id]]
        return payload

    @app.get("/api/detect/{name}")
    def detect(name: str, request: Request):
        st = loaded()
        if name not in DETECTOR_NAMES:
            raise HTTPException(404, f"unknown detector {name!r}")
        config = _parse_detector_config(request.query_params)
        matrix = st.container.matrix
        try:
            if name == "homogeneous":
                report = analysis.detect_homogeneous(matrix, config)
            elif name == "simple-subsets":
                report = analysis.detect_simple_subsets(matrix, config)
            elif name == "outliers":
                report = analysis.detect_outliers(matrix, st.dataset.labels, st.index, config)
            else:
                if st.index is None:
                    raise HTTPException(400, "detector 'ood' needs a neighbor index (serve with --index-cache)")
                report = analysis.detect_ood(matrix, st.dataset.labels, st.index, config)
        except ConfigError as exc:
            raise HTTPException(400, str(exc)) from None
        return JSONResponse(report.to_json_dict())

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _json_label(value):
    try:
        return int(value)
    except (TypeError, ValueError):
        return str(value)
