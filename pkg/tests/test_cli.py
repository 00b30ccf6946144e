import csv
import json
import os

import numpy as np
import pytest
from PIL import Image

from qi2 import load_results
from qi2.cli import main


def write_sine_csv(path, n=120, seed=3):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(0.0, 12.0, n))
    y = np.sin(x) + rng.normal(0.0, 0.05, n)
    with open(path, "w") as fh:
        for a, b in zip(x, y):
            fh.write(f"{float(a)!r},{float(b)!r}\n")
    return path


def write_blob_csv(path):
    rng = np.random.default_rng(7)
    xa = rng.uniform(0.0, 10.0, 50)
    xb = rng.uniform(100.0, 110.0, 50)
    x = np.concatenate([xa, xb, [105.03]])
    labels = [0] * 50 + [1] * 50 + [0]
    with open(path, "w") as fh:
        for v, lab in zip(x, labels):
            fh.write(f"{float(v)!r},{lab},{lab}\n")
    return path


@pytest.fixture()
def sine_csv(tmp_path):
    return write_sine_csv(tmp_path / "sine.csv")


def run(args):
    return main([str(a) for a in args])


class TestCompute:
    def test_full_pipeline(self, tmp_path, sine_csv, capsys):
        out = tmp_path / "sine.qi2"
        code = run(["compute", "--csv", sine_csv, "--input-cols", "0",
                    "--output-cols", "1", "--kmax", "40", "--threads", "1",
                    "--out", out])
        assert code == 0
        printed = capsys.readouterr().out
        assert "QI2R(global)=" in printed
        cont = load_results(out)
        assert cont.matrix.values.shape == (120, 40)
        assert cont.meta["input_metric"] == "euclidean"
        assert "global_qi2r" in cont.meta

    def test_missing_output_cols_exits_1(self, tmp_path, sine_csv, capsys):
        code = run(["compute", "--csv", sine_csv, "--input-cols", "0",
                    "--kmax", "10", "--out", tmp_path / "x.qi2"])
        assert code == 1

    def test_usage_error_exits_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["compute", "--csv", "f.csv"])   # missing required --kmax/--out
        assert exc.value.code == 1
        assert "usage" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path, capsys):
        code = run(["compute", "--csv", tmp_path / "absent.csv", "--input-cols", "0",
                    "--output-cols", "1", "--kmax", "5", "--out", tmp_path / "x.qi2"])
        assert code == 2

    def test_config_file_supplies_flags(self, tmp_path, sine_csv):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"kmax": 15, "threads": 1, "gamma": 1.0}))
        out = tmp_path / "s.qi2"
        code = run(["compute", "--csv", sine_csv, "--input-cols", "0",
                    "--output-cols", "1", "--config", conf, "--out", out])
        assert code == 0
        cont = load_results(out)
        assert cont.matrix.values.shape[1] == 15
        assert cont.grid.gamma == 1.0

    def test_index_cache_reused(self, tmp_path, sine_csv):
        cache = tmp_path / "sine.knn"
        out1 = tmp_path / "a.qi2"
        out2 = tmp_path / "b.qi2"
        args = ["compute", "--csv", sine_csv, "--input-cols", "0", "--output-cols", "1",
                "--kmax", "20", "--threads", "1", "--index-cache", cache]
        assert run(args + ["--out", out1]) == 0
        assert cache.exists()
        assert run(args + ["--out", out2]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestAnalyze:
    @pytest.fixture()
    def blob_container(self, tmp_path):
        csv_path = write_blob_csv(tmp_path / "blobs.csv")
        out = tmp_path / "blobs.qi2"
        code = run(["compute", "--csv", csv_path, "--input-cols", "0",
                    "--output-cols", "1", "--label-col", "2",
                    "--output-metric", "discrete", "--kmax", "40",
                    "--threads", "1", "--out", out])
        assert code == 0
        return csv_path, out

    def test_outlier_detector_finds_planted_point(self, tmp_path, blob_container):
        csv_path, container = blob_container
        out_dir = tmp_path / "reports"
        code = run(["analyze", "--container", container, "--csv", csv_path,
                    "--input-cols", "0", "--output-cols", "1", "--label-col", "2",
                    "--detector", "outliers", "--out-dir", out_dir, "--threads", "1"])
        assert code == 0
        report = json.loads((out_dir / "report_outliers.json").read_text())
        assert [e["id"] for e in report["flagged"]] == [100]
        rows = list(csv.reader((out_dir / "report_outliers.csv").open()))
        assert len(rows) == 2 and rows[1][0] == "100"

    def test_clean_fixture_empty_report(self, tmp_path, sine_csv):
        out = tmp_path / "sine.qi2"
        run(["compute", "--csv", sine_csv, "--input-cols", "0", "--output-cols", "1",
             "--kmax", "30", "--threads", "1", "--out", out])
        out_dir = tmp_path / "reports"
        code = run(["analyze", "--container", out, "--csv", sine_csv,
                    "--input-cols", "0", "--output-cols", "1",
                    "--detector", "homogeneous", "--homog-k-range", "10,30",
                    "--out-dir", out_dir, "--threads", "1"])
        assert code == 0
        report = json.loads((out_dir / "report_homogeneous.json").read_text())
        assert report["flagged"] == []

    def test_unknown_detector_exits_1(self, tmp_path, blob_container, capsys):
        csv_path, container = blob_container
        with pytest.raises(SystemExit) as exc:
            run(["analyze", "--container", container, "--csv", csv_path,
                 "--input-cols", "0", "--output-cols", "1",
                 "--detector", "bogus", "--out-dir", tmp_path])
        assert exc.value.code == 1

    def test_cluster_counts(self, tmp_path, blob_container):
        csv_path, container = blob_container
        out_dir = tmp_path / "counts"
        code = run(["analyze", "--container", container, "--csv", csv_path,
                    "--input-cols", "0", "--output-cols", "1", "--label-col", "2",
                    "--detector", "cluster-counts", "--k-list", "10,40",
                    "--out-dir", out_dir, "--threads", "1"])
        assert code == 0
        rows = list(csv.reader((out_dir / "cluster_counts.csv").open()))
        assert rows[0] == ["k", "count"]
        assert len(rows) == 3

    def test_wrong_dataset_fingerprint_exits_2(self, tmp_path, blob_container, sine_csv):
        _, container = blob_container
        code = run(["analyze", "--container", container, "--csv", sine_csv,
                    "--input-cols", "0", "--output-cols", "1",
                    "--detector", "homogeneous", "--out-dir", tmp_path])
        assert code == 2


class TestRender:
    @pytest.fixture()
    def container(self, tmp_path, sine_csv):
        out = tmp_path / "sine.qi2"
        run(["compute", "--csv", sine_csv, "--input-cols", "0", "--output-cols", "1",
             "--kmax", "25", "--threads", "1", "--out", out])
        return out

    def test_render_png_at_scale(self, tmp_path, container):
        png = tmp_path / "map.png"
        assert run(["render", "--container", container, "--out", png, "--scale", "3"]) == 0
        img = np.asarray(Image.open(png))
        assert img.shape == (300, 75)

    def test_bad_path_exits_2(self, tmp_path, container):
        code = run(["render", "--container", container,
                    "--out", tmp_path / "no" / "dir" / "x.png"])
        assert code == 2

    def test_gamma_rerender_is_elementwise_power(self, tmp_path, container):
        p05 = tmp_path / "g05.png"
        p10 = tmp_path / "g10.png"
        assert run(["render", "--container", container, "--out", p05]) == 0
        assert run(["render", "--container", container, "--out", p10, "--gamma", "1.0"]) == 0
        cont = load_results(container)
        base = cont.grid.grid                      # stored at gamma 0.5
        img10 = np.asarray(Image.open(p10))
        expected = np.rint(np.flipud(base ** 2.0) * 255).astype(np.uint8)
        assert np.array_equal(img10, expected)
        img05 = np.asarray(Image.open(p05))
        assert np.array_equal(img05, np.rint(np.flipud(base) * 255).astype(np.uint8))


class TestDeterminism:
    def test_thread_env_does_not_change_container(self, tmp_path, sine_csv):
        outs = []
        for workers in ("1", "4"):
            out = tmp_path / f"sine_{workers}.qi2"
            env_before = os.environ.get("QI2_THREADS")
            os.environ["QI2_THREADS"] = workers
            try:
                assert run(["compute", "--csv", sine_csv, "--input-cols", "0",
                            "--output-cols", "1", "--kmax", "30", "--out", out]) == 0
            finally:
                if env_before is None:
                    os.environ.pop("QI2_THREADS", None)
                else:
                    os.environ["QI2_THREADS"] = env_before
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
