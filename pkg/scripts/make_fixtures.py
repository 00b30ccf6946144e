#!/usr/bin/env python3
"""Generate the synthetic fixture CSVs used throughout the docs and demos.

Writes into ./fixtures (or the directory given as the first argument):
  sine.csv           300 rows, x and sin(x) with mild noise
  noisy_sine.csv     clean sine for x<10, heavy noise beyond (simple-subset demo)
  two_blobs.csv      two far-separated single-class 1-D blobs (homogeneous demo)
  outlier_blobs.csv  two-class blobs plus one mislabeled point planted at id 100
  ood_blobs.csv      2-D blobs plus one displaced same-class point at id 120
"""

import sys
from pathlib import Path

import numpy as np


def write_csv(path, columns, labels=None):
    rows = np.column_stack(columns)
    with open(path, "w") as fh:
        for r in range(rows.shape[0]):
            cells = [repr(float(v)) for v in rows[r]]
            if labels is not None:
                cells.append(str(labels[r]))
            fh.write(",".join(cells) + "\n")
    print(f"wrote {path} ({rows.shape[0]} rows)")


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("fixtures")
    out.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(3)
    x = np.sort(rng.uniform(0.0, 12.0, 300))
    y = np.sin(x) + rng.normal(0.0, 0.05, 300)
    write_csv(out / "sine.csv", [x, y])

    rng = np.random.default_rng(11)
    x = np.sort(rng.uniform(0.0, 20.0, 300))
    y = np.sin(x)
    noisy = x > 10.0
    y[noisy] += rng.uniform(-2.0, 2.0, noisy.sum())
    write_csv(out / "noisy_sine.csv", [x, y])

    rng = np.random.default_rng(42)
    x = np.concatenate([rng.uniform(0.0, 10.0, 60), rng.uniform(1000.0, 1010.0, 60)])
    lab = np.array([0] * 60 + [1] * 60)
    write_csv(out / "two_blobs.csv", [x, lab.astype(float)], labels=lab)

    rng = np.random.default_rng(7)
    x = np.concatenate([rng.uniform(0.0, 10.0, 50),
                        rng.uniform(100.0, 110.0, 50), [105.03]])
    lab = np.array([0] * 50 + [1] * 50 + [0])
    write_csv(out / "outlier_blobs.csv", [x, lab.astype(float)], labels=lab)

    rng = np.random.default_rng(3)
    a = rng.uniform(0.0, 10.0, (60, 2))
    b = rng.uniform(1000.0, 1010.0, (60, 2))
    pts = np.vstack([a, b, [[15.0, 15.0]]])
    lab = np.array([0] * 60 + [1] * 60 + [0])
    write_csv(out / "ood_blobs.csv", [pts[:, 0], pts[:, 1], lab.astype(float)], labels=lab)


if __name__ == "__main__":
    main()
