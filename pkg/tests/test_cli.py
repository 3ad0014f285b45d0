import json

import pytest

from pcrle.cli import main


def run(args):
    return main([str(a) for a in args])


@pytest.fixture()
def dataset_csv(tmp_path):
    out = tmp_path / "in"
    code = run(["sample", "--model", "uniform-cube", "--n", 300, "--d", 1,
                "--f0", "eigenfunction", "--k", 4, "--seed", 5,
                "--out-dir", out, "--stem", "data"])
    assert code == 0
    return out / "data.csv"


class TestSample:
    def test_writes_csv_and_manifest(self, tmp_path):
        out = tmp_path / "o"
        code = run(["sample", "--n", 50, "--seed", 1, "--out-dir", out])
        assert code == 0
        assert (out / "data.csv").exists()
        manifest = json.loads((out / "data.manifest.json").read_text())
        assert manifest["command"] == "sample"
        assert manifest["seed"] == 1
        assert str(out / "data.csv") in manifest["outputs"]

    def test_seed_reproducible(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run(["sample", "--n", 40, "--seed", 9, "--out-dir", a])
        run(["sample", "--n", 40, "--seed", 9, "--out-dir", b])
        assert (a / "data.csv").read_bytes() == (b / "data.csv").read_bytes()

    def test_cluster_model(self, tmp_path):
        code = run(["sample", "--model", "cluster", "--n", 100, "--r", 0.1,
                    "--f0", "cluster", "--theta", 3, "--out-dir", tmp_path])
        assert code == 0

    def test_bad_params_exit_2(self, tmp_path):
        code = run(["sample", "--model", "cluster", "--n", 10, "--r", 0.4,
                    "--out-dir", tmp_path])
        assert code == 2


class TestFit:
    def test_pcr_le_fit_files(self, dataset_csv, tmp_path):
        out = tmp_path / "fit"
        code = run(["fit", "--method", "pcr-le", "--k", 5, "--eps", 0.05,
                    "--in", dataset_csv, "--out-dir", out, "--stem", "fit"])
        assert code == 0
        assert (out / "fit.csv").exists()
        result = json.loads((out / "fit.json").read_text())
        assert result["method"] == "pcr-le"
        assert result["tuning"]["K"] == 5
        header = (out / "fit.csv").read_text().splitlines()[0]
        assert header == "x1,y,f0,fitted"

    def test_out_path_flag(self, dataset_csv, tmp_path):
        out = tmp_path / "direct" / "fit.csv"
        code = run(["fit", "--method", "pcr-le", "--k", 5, "--eps", 0.05,
                    "--in", dataset_csv, "--out", out])
        assert code == 0
        assert out.exists()
        assert (tmp_path / "direct" / "fit.json").exists()

    def test_auto_tune_echoed_in_manifest(self, dataset_csv, tmp_path):
        out = tmp_path / "fit"
        code = run(["fit", "--method", "pcr-le", "--auto-tune", "--s", 1, "--M", 1,
                    "--in", dataset_csv, "--out-dir", out, "--stem", "auto"])
        assert code == 0
        manifest = json.loads((out / "auto.manifest.json").read_text())
        assert manifest["config"]["auto_tune"] is True
        result = json.loads((out / "auto.json").read_text())
        assert result["tuning"]["K"] >= 1  # resolved by the tuning rules

    @pytest.mark.parametrize("method,extra", [
        ("spectral-series", ["--k", 4]),
        ("kernel-smoothing", ["--h", 0.1]),
        ("uniform-ls", ["--k", 4]),
        ("laplacian-smoothing", ["--eps", 0.05, "--lam", 2.0]),
    ])
    def test_other_methods(self, dataset_csv, tmp_path, method, extra):
        code = run(["fit", "--method", method, "--in", dataset_csv,
                    "--out-dir", tmp_path, "--stem", method] + extra)
        assert code == 0
        assert (tmp_path / f"{method}.json").exists()

    def test_malformed_csv_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("x1,y,f0\n1,2,3\n4,nope,6\n")
        code = run(["fit", "--method", "uniform-ls", "--k", 2, "--in", bad,
                    "--out-dir", tmp_path])
        assert code == 2
        assert "row 3" in capsys.readouterr().err

    def test_missing_tuning_exit_2(self, dataset_csv, tmp_path):
        code = run(["fit", "--method", "pcr-le", "--in", dataset_csv,
                    "--out-dir", tmp_path])
        assert code == 2


class TestTestCommand:
    def test_reject_flag_in_json(self, dataset_csv, tmp_path):
        code = run(["test", "--method", "pcr-le", "--a", 0.05, "--k", 5,
                    "--eps", 0.05, "--in", dataset_csv,
                    "--out-dir", tmp_path, "--stem", "t"])
        assert code == 0
        result = json.loads((tmp_path / "t.json").read_text())
        assert result["level"] == 0.05
        assert isinstance(result["reject"], bool)
        assert result["reject"] == (result["statistic"] >= result["threshold"])


class TestSweep:
    def _config(self, tmp_path, **overrides):
        data = {"kind": "estimation", "n_grid": [120, 240, 480],
                "methods": ["pcr-le", "spectral-series"],
                "replications": 4, "seed": 3, "d": 1, "s": 1, "M": 1.0}
        data.update(overrides)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(data))
        return path

    def test_emits_three_files(self, tmp_path):
        cfg = self._config(tmp_path)
        out = tmp_path / "o"
        code = run(["sweep", "--config", cfg, "--out-dir", out, "--stem", "est"])
        assert code == 0
        assert (out / "est.csv").exists()
        assert (out / "est.manifest.json").exists()
        assert (out / "est.svg").exists()
        manifest = json.loads((out / "est.manifest.json").read_text())
        assert manifest["config"]["seed"] == 3
        assert "pcr-le" in manifest["slopes"]

    def test_dry_run_manifest_only(self, tmp_path):
        cfg = self._config(tmp_path)
        out = tmp_path / "dry"
        code = run(["sweep", "--config", cfg, "--dry-run", "--out-dir", out])
        assert code == 0
        assert (out / "sweep.manifest.json").exists()
        assert not (out / "sweep.csv").exists()

    def test_byte_identical_rerun(self, tmp_path):
        cfg = self._config(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        run(["sweep", "--config", cfg, "--out-dir", a])
        run(["sweep", "--config", cfg, "--out-dir", b])
        assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()

    def test_invalid_config_exit_2(self, tmp_path):
        cfg = self._config(tmp_path, n_grid=[200, 100])
        assert run(["sweep", "--config", cfg, "--out-dir", tmp_path]) == 2

    def test_unknown_config_field_exit_2(self, tmp_path, capsys):
        cfg = self._config(tmp_path, bandwidth=0.5)
        assert run(["sweep", "--config", cfg, "--out-dir", tmp_path]) == 2
        assert "bandwidth" in capsys.readouterr().err

    def test_testing_kind(self, tmp_path):
        cfg = self._config(tmp_path, kind="testing", n_grid=[150],
                           replications=10, methods=["pcr-le"])
        out = tmp_path / "t"
        assert run(["sweep", "--config", cfg, "--out-dir", out]) == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "method,n,critical_radius"


class TestClusterDemoAndSparsify:
    def test_cluster_demo(self, tmp_path):
        code = run(["cluster-demo", "--n", 300, "--theta", 3, "--r", 0.1,
                    "--reps", 5, "--seed", 2, "--out-dir", tmp_path])
        assert code == 0
        text = (tmp_path / "cluster.csv").read_text()
        assert text.splitlines()[0] == "method,mean,se,tuning"
        data = json.loads((tmp_path / "cluster.json").read_text())
        assert {"pcr-le", "kernel-smoothing", "uniform-ls"} == {r["method"] for r in data["rows"]}

    def test_sparsify(self, dataset_csv, tmp_path):
        code = run(["sparsify", "--in", dataset_csv, "--eps", 0.1, "--keep", 0.5,
                    "--seed", 4, "--out-dir", tmp_path])
        assert code == 0
        report = json.loads((tmp_path / "sparse.json").read_text())
        assert report["kept_edges"] <= report["original_edges"]
        assert (tmp_path / "sparse.edges").exists()


def test_version_and_usage_exit_codes(capsys):
    with pytest.raises(SystemExit) as been:
        main(["--version"])
    assert been.value.code == 0
    with pytest.raises(SystemExit) as been:
        main(["fit"])  # missing required args
    assert been.value.code == 2
