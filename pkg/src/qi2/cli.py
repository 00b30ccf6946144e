"""Batch command line: compute, analyze, render, serve.

Exit codes: 1 configuration error (including usage), 2 data error,
3 internal error. A JSON config file may supply any flag; explicit flags
win. QI2_THREADS caps the worker count.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import analysis, export
from ._parallel import resolve_workers
from .core import (Stabilizers, compute_mlqi2, compute_shlqi2,
                   compute_stabilizers, default_bin_width)
from .dataset import load_csv, load_embedding, load_idx_mnist
from .errors import ConfigError, DataError, Qi2Error
from .knn import build_index, load_index, save_index
from .metrics import METRIC_KINDS, MetricSpec

DETECTORS = ("outliers", "homogeneous", "ood", "simple-subsets", "cluster-counts")


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors: exit 1, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_dataset_args(p):
    p.add_argument("--csv", help="CSV dataset path")
    p.add_argument("--input-cols", type=_int_list, help="comma-separated input column indices")
    p.add_argument("--output-cols", type=_int_list, help="comma-separated output column indices")
    p.add_argument("--label-col", type=int, help="label column index")
    p.add_argument("--mnist-images", help="IDX ubyte images path")
    p.add_argument("--mnist-labels", help="IDX ubyte labels path")


def _add_common_args(p):
    p.add_argument("--config", help="JSON file supplying defaults for any flag")
    p.add_argument("--threads", type=int, help="worker cap (default: QI2_THREADS or CPU count)")


def _load_dataset(args):
    if args.mnist_images or args.mnist_labels:
        if not (args.mnist_images and args.mnist_labels):
            raise ConfigError("--mnist-images and --mnist-labels must be given together")
        return load_idx_mnist(args.mnist_images, args.mnist_labels)
    if not args.csv:
        raise ConfigError("a dataset is required: --csv or --mnist-images/--mnist-labels")
    if not args.input_cols or not args.output_cols:
        raise ConfigError("--input-cols and --output-cols are required with --csv")
    return load_csv(args.csv, args.input_cols, args.output_cols, label_col=args.label_col)


def _get_index(args, dataset, input_metric, k_max, workers):
    cache = getattr(args, "index_cache", None)
    if cache and Path(cache).exists():
        index = load_index(cache)
        if index.n != dataset.n or index.k_max < k_max:
            raise DataError(
                f"{cache}: cached index does not cover this dataset/k_max "
                f"(n={index.n}, k_max={index.k_max})"
            )
        return index
    index = build_index(dataset, input_metric, k_max, workers=workers)
    if cache:
        save_index(index, cache)
    return index


def cmd_compute(args) -> int:
    t0 = time.perf_counter()
    dataset = _load_dataset(args)
    input_metric = MetricSpec(args.input_metric)
    output_metric = MetricSpec(args.output_metric)
    workers = resolve_workers(args.threads)
    stab = compute_stabilizers(dataset, input_metric, output_metric, rel=args.epsilon)

    t1 = time.perf_counter()
    index = _get_index(args, dataset, input_metric, args.kmax, workers)
    t2 = time.perf_counter()
    matrix = compute_mlqi2(dataset, index, input_metric, output_metric, stab,
                           k_max=args.kmax, workers=workers)
    t3 = time.perf_counter()
    width = args.bin_width if args.bin_width else default_bin_width(matrix, args.bins, args.bin_min)
    grid = compute_shlqi2(matrix, bin_min=args.bin_min, bin_width=width,
                          bin_count=args.bins, gamma=args.gamma,
                          column_norm=args.column_norm, overflow_policy=args.overflow)
    global_value = analysis.global_qi2r(dataset, input_metric, output_metric, stab,
                                        workers=workers)
    t4 = time.perf_counter()
    meta = {
        "dataset_fingerprint": dataset.fingerprint(),
        "source": dataset.source_meta,
        "input_metric": input_metric.kind,
        "output_metric": output_metric.kind,
        "epsilon_rel": stab.rel,
        "epsilon_abs_input": stab.input_abs,
        "epsilon_abs_output": stab.output_abs,
        "global_qi2r": global_value,
    }
    export.save_results(matrix, grid, args.out, meta)
    print(f"QI2R(global)={global_value!r}")
    print(f"timing: load={t1 - t0:.2f}s index={t2 - t1:.2f}s local={t3 - t2:.2f}s "
          f"grid+global={t4 - t3:.2f}s total={time.perf_counter() - t0:.2f}s")
    print(f"wrote {args.out}")
    return 0


def _detector_config(args) -> analysis.DetectorConfig:
    kwargs = {}
    for name in ("outlier_k1_max", "outlier_spike_min", "simple_low_max"):
        v = getattr(args, name, None)
        if v is not None:
            kwargs[name] = v
    if args.simple_persistence is not None:
        kwargs["simple_persistence"] = args.simple_persistence
    if args.homog_band is not None:
        kwargs["homog_band"] = tuple(args.homog_band)
    if args.homog_k_range is not None:
        kwargs["homog_k_range"] = tuple(args.homog_k_range)
    if args.outlier_rise_k_range is not None:
        kwargs["outlier_rise_k_range"] = tuple(args.outlier_rise_k_range)
    return analysis.DetectorConfig(**kwargs)


def cmd_analyze(args) -> int:
    dataset = _load_dataset(args)
    container = export.load_results(args.container, expected_fingerprint=dataset.fingerprint())
    matrix = container.matrix
    config = _detector_config(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = resolve_workers(args.threads)

    needs_index = set(args.detector) & {"ood", "cluster-counts"}
    index = None
    if needs_index:
        input_metric = MetricSpec(container.meta["input_metric"])
        index = _get_index(args, dataset, input_metric, matrix.k_max, workers)

    for name in args.detector:
        if name == "cluster-counts":
            counts = analysis.homogeneous_cluster_counts(dataset.labels, index, args.k_list)
            path = out_dir / "cluster_counts.csv"
            with open(path, "w") as fh:
                fh.write("k,count\n")
                for k, count in counts:
                    fh.write(f"{k},{count}\n")
            print(f"wrote {path}")
            continue
        if name == "homogeneous":
            report = analysis.detect_homogeneous(matrix, config)
        elif name == "ood":
            report = analysis.detect_ood(matrix, dataset.labels, index, config)
        elif name == "outliers":
            report = analysis.detect_outliers(matrix, dataset.labels, index, config)
        else:
            report = analysis.detect_simple_subsets(matrix, config)
        stem = out_dir / f"report_{name.replace('-', '_')}"
        with open(f"{stem}.json", "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=2)
        export.export_report_csv(report, f"{stem}.csv", labels=dataset.labels)
        print(f"{name}: {len(report.flagged)} flagged -> {stem}.json / {stem}.csv")
    return 0


def cmd_render(args) -> int:
    container = export.load_results(args.container)
    grid = container.grid
    if args.gamma is not None and args.gamma != grid.gamma:
        # stored grid already carries its gamma; re-render via the power ratio
        regraded = grid.grid ** (args.gamma / grid.gamma)
        grid = type(grid)(grid=regraded, bin_min=grid.bin_min, bin_width=grid.bin_width,
                          bin_count=grid.bin_count, gamma=args.gamma,
                          column_norm=grid.column_norm, overflow_policy=grid.overflow_policy)
    export.render_heatmap(grid, args.out, scale=args.scale)
    print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    dataset = _load_dataset(args)
    container = export.load_results(args.container, expected_fingerprint=dataset.fingerprint())
    embedding = load_embedding(args.embedding, dataset) if args.embedding else None
    index = None
    if args.index_cache and Path(args.index_cache).exists():
        index = load_index(args.index_cache)
    static_dir = args.ui_dir if args.ui_dir and Path(args.ui_dir).is_dir() else None
    app = create_app(container=container, dataset=dataset, embedding=embedding,
                     index=index, select_cap=args.select_cap, static_dir=static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="qi2", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute",
                       help="load -> index -> local indicator -> heatmap -> container")
    _add_dataset_args(p)
    _add_common_args(p)
    p.add_argument("--kmax", type=int, required=True, help="neighborhood cap")
    p.add_argument("--input-metric", choices=METRIC_KINDS, default="euclidean")
    p.add_argument("--output-metric", choices=METRIC_KINDS, default="euclidean")
    p.add_argument("--epsilon", type=float, default=1e-9, help="relative stabilizer")
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--bin-min", type=float, default=0.0)
    p.add_argument("--bin-width", type=float, default=None,
                   help="default: span [bin-min, max(2.5, observed max)]")
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--column-norm", choices=("max", "sum"), default="max")
    p.add_argument("--overflow", choices=("clamp", "drop"), default="clamp")
    p.add_argument("--index-cache", help="read/write the neighbor index here")
    p.add_argument("--out", required=True, help="result container path")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("analyze", help="run detectors on a container")
    _add_dataset_args(p)
    _add_common_args(p)
    p.add_argument("--container", required=True)
    p.add_argument("--detector", action="append", choices=DETECTORS, required=True,
                   help="repeatable")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--index-cache")
    p.add_argument("--k-list", type=_int_list, default=[100, 200, 300, 500, 1000],
                   help="k values for cluster-counts")
    p.add_argument("--outlier-k1-max", dest="outlier_k1_max", type=float)
    p.add_argument("--outlier-spike-min", dest="outlier_spike_min", type=float)
    p.add_argument("--outlier-rise-k-range", dest="outlier_rise_k_range", type=_int_list)
    p.add_argument("--homog-band", dest="homog_band", type=lambda s: [float(x) for x in s.split(",")])
    p.add_argument("--homog-k-range", dest="homog_k_range", type=_int_list)
    p.add_argument("--simple-low-max", dest="simple_low_max", type=float)
    p.add_argument("--simple-persistence", dest="simple_persistence", type=int)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("render", help="render the heatmap PNG")
    _add_common_args(p)
    p.add_argument("--container", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--gamma", type=float, default=None, help="re-render at a different gamma")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="serve the workbench API and UI")
    _add_dataset_args(p)
    _add_common_args(p)
    p.add_argument("--container", required=True)
    p.add_argument("--embedding", help="2-D coordinates CSV")
    p.add_argument("--index-cache")
    p.add_argument("--ui-dir", help="static UI bundle to serve at /")
    p.add_argument("--select-cap", type=int, default=10_000,
                   help="maximum ids returned per selection")
    p.add_argument("--port", type=int, default=8472)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)
    return parser


def _apply_config_file(argv: list[str], parser: _Parser) -> list[str]:
    """Prepend flags from --config JSON so explicit argv wins."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        return argv
    try:
        with open(argv[idx + 1]) as fh:
            conf = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {argv[idx + 1]}: {exc}") from exc
    if not isinstance(conf, dict):
        raise ConfigError("config file must hold a JSON object of flag/value pairs")
    extra: list[str] = []
    for key, value in conf.items():
        flag = "--" + key.replace("_", "-").lstrip("-")
        if isinstance(value, bool):
            if value:
                extra.append(flag)
        elif isinstance(value, list):
            extra.extend([flag, ",".join(str(v) for v in value)])
        else:
            extra.extend([flag, str(value)])
    return argv[:1] + extra + argv[1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv_full = _apply_config_file(argv, parser)
        args = parser.parse_args(argv_full)
        return args.func(args)
    except ConfigError as exc:
        print(f"qi2: configuration error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"qi2: data error: {exc}", file=sys.stderr)
        return 2
    except Qi2Error as exc:
        print(f"qi2: error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"qi2: i/o error: {exc}", file=sys.stderr)
        return 2
    except SystemExit:
        raise
    except Exception as exc:   # pragma: no cover - defensive
        print(f"qi2: internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
