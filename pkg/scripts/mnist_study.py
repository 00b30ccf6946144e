#!/usr/bin/env python3
"""MNIST study driver (needs the IDX files locally; the train run is hours).

Usage:
  python scripts/mnist_study.py --data-dir ~/mnist --which test --kmax 1000
  python scripts/mnist_study.py --data-dir ~/mnist --which train --kmax 3000 \
      --output-metric discrete --full-indicator

Stages (all optional beyond the index):
  cluster counts      per-k counts of points whose k nearest neighbors all
                      share the point's label (fast; index only)
  full indicator      the local-value matrix and heatmap (expensive at 60k)
"""

import argparse
import json
import time
from pathlib import Path

from qi2 import (MetricSpec, build_index, compute_mlqi2, compute_shlqi2,
                 compute_stabilizers, default_bin_width,
                 homogeneous_cluster_counts, load_idx_mnist, render_heatmap,
                 save_index, save_results)


def find_idx(directory: Path, prefix: str, kind: str) -> Path:
    for name in (f"{prefix}-{kind}", f"{prefix}-{kind}".replace("-idx", ".idx")):
        for suffix in ("", ".gz"):
            p = directory / f"{name}{suffix}"
            if p.exists():
                return p
    raise SystemExit(f"cannot find {prefix} {kind} under {directory}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data-dir", required=True, type=Path)
    ap.add_argument("--which", choices=("train", "test"), default="test")
    ap.add_argument("--kmax", type=int, default=1000)
    ap.add_argument("--output-metric", choices=("euclidean", "discrete"), default="euclidean")
    ap.add_argument("--k-list", default="100,200,300,500,1000")
    ap.add_argument("--full-indicator", action="store_true",
                    help="also compute the local-value matrix and heatmap")
    ap.add_argument("--out-dir", type=Path, default=Path("mnist_out"))
    args = ap.parse_args()

    prefix = "train" if args.which == "train" else "t10k"
    images = find_idx(args.data_dir, prefix, "images-idx3-ubyte")
    labels = find_idx(args.data_dir, prefix, "labels-idx1-ubyte")
    args.out_dir.mkdir(parents=True, exist_ok=True)

    t0 = time.time()
    ds = load_idx_mnist(images, labels)
    print(f"loaded {ds.n} images in {time.time() - t0:.1f}s")

    mi = MetricSpec("euclidean")
    t0 = time.time()
    index = build_index(ds, mi, k_max=args.kmax)
    print(f"neighbor index (k_max={args.kmax}) in {time.time() - t0:.1f}s")
    save_index(index, args.out_dir / f"{args.which}_k{args.kmax}.knn")

    k_list = [int(k) for k in args.k_list.split(",") if 0 < int(k) <= args.kmax]
    counts = homogeneous_cluster_counts(ds.labels, index, k_list)
    counts_path = args.out_dir / f"{args.which}_cluster_counts.json"
    counts_path.write_text(json.dumps({str(k): c for k, c in counts}, indent=2, sort_keys=True))
    print("cluster counts:", dict(counts), "->", counts_path)

    if args.full_indicator:
        mo = MetricSpec(args.output_metric)
        stab = compute_stabilizers(ds, mi, mo)
        t0 = time.time()
        matrix = compute_mlqi2(ds, index, mi, mo, stab)
        print(f"local indicator matrix in {time.time() - t0:.1f}s; "
              f"peak value {matrix.values[matrix.valid].max():.1f}")
        grid = compute_shlqi2(matrix, 0.0, default_bin_width(matrix), 100)
        container = args.out_dir / f"{args.which}.qi2"
        save_results(matrix, grid, container, {
            "dataset_fingerprint": ds.fingerprint(),
            "input_metric": mi.kind, "output_metric": mo.kind,
            "epsilon_rel": stab.rel,
            "epsilon_abs_input": stab.input_abs,
            "epsilon_abs_output": stab.output_abs,
        })
        render_heatmap(grid, args.out_dir / f"{args.which}_heatmap.png", scale=2)
        print(f"container -> {container}")


if __name__ == "__main__":
    main()
