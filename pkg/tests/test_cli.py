import json
import math

import pytest

from gated_perceptron.cli import main
from gated_perceptron.model import GatedModel, save_model


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestTrain:
    def test_wdbc_gated(self, capsys, tmp_path):
        code, out, _ = run(capsys, "train", "--schema", "wdbc", "--lr", "0.5", "--epochs", "100",
                           "--seed", "1", "--out", str(tmp_path))
        assert code == 0
        report = json.loads(out)
        assert report["accuracy"] >= 0.94
        for name in ("model.txt", "loss.csv", "metrics.json", "roc.csv"):
            assert (tmp_path / name).stat().st_size > 0
        assert len((tmp_path / "loss.csv").read_text().splitlines()) == 101

    def test_pima_defaults_finite(self, capsys):
        code, out, _ = run(capsys, "train", "--schema", "pima")
        assert code == 0
        report = json.loads(out)
        for key in ("accuracy", "precision", "recall", "f1", "auc"):
            assert math.isfinite(report[key])

    def test_softmax(self, capsys, tmp_path):
        code, out, _ = run(capsys, "train", "--model", "softmax", "--epochs", "50", "--out", str(tmp_path))
        assert code == 0
        assert 0.0 <= json.loads(out)["accuracy"] <= 1.0
        assert (tmp_path / "model.txt").read_text().startswith("softmaxmodel v1")

    def test_epochs_zero_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["train", "--epochs", "0"])
        assert exc.value.code == 2

    def test_unsupported_pair(self, capsys):
        code, _, err = run(capsys, "train", "--schema", "wdbc", "--model", "softmax")
        assert code == 2
        assert "error [config]" in err

    def test_missing_data_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "train", "--schema", "wdbc", "--data", str(tmp_path / "none.csv"))
        assert code == 3
        assert "error [load]" in err

    def test_byte_identical_outputs(self, capsys, tmp_path):
        for d in ("a", "b"):
            assert run(capsys, "train", "--schema", "pima", "--epochs", "20", "--seed", "7",
                       "--out", str(tmp_path / d))[0] == 0
        for name in ("model.txt", "loss.csv", "metrics.json", "roc.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


class TestRepro:
    def test_table_and_json(self, capsys, tmp_path):
        code, out, _ = run(capsys, "repro", "--schema", "wdbc", "--reps", "3", "--epochs", "20",
                           "--out", str(tmp_path))
        assert code == 0
        assert "mean" in out.lower()
        payload = json.loads((tmp_path / "repro.json").read_text())
        runs = payload["runs"]
        assert len(runs) == 3
        mean = sum(r["accuracy"] for r in runs) / 3
        assert abs(payload["mean"]["accuracy"] - mean) <= 1e-9

    def test_parallel_matches_serial(self, capsys, tmp_path):
        for d, jobs in (("s", "1"), ("p", "3")):
            run(capsys, "repro", "--schema", "pima", "--reps", "3", "--epochs", "10",
                "--jobs", jobs, "--out", str(tmp_path / d))
        assert (tmp_path / "s" / "repro.json").read_bytes() == (tmp_path / "p" / "repro.json").read_bytes()

    def test_lr_sweep(self, capsys, tmp_path):
        code, _, _ = run(capsys, "repro", "--schema", "wdbc", "--reps", "1", "--epochs", "5",
                         "--lr-sweep", "0.05,1.2", "--out", str(tmp_path))
        assert code == 0
        assert set(json.loads((tmp_path / "repro.json").read_text())) == {"0.05", "1.2"}

    def test_bad_sweep(self, capsys):
        assert run(capsys, "repro", "--lr-sweep", "0.1,x")[0] == 2


class TestRegions:
    @pytest.mark.parametrize("name,count", [("gated-3", 13), ("plain-2", 4), ("gated-1", 3)])
    def test_fixture_counts(self, capsys, name, count):
        code, out, _ = run(capsys, "regions", "--fixture", name)
        assert code == 0
        assert out.strip() == str(count)

    def test_outputs(self, capsys, tmp_path):
        code, _, _ = run(capsys, "regions", "--fixture", "gated-2", "--resolution", "300",
                         "--out", str(tmp_path))
        assert code == 0
        assert (tmp_path / "regions.pgm").read_text().startswith("P2\n300 300\n")
        assert json.loads((tmp_path / "regions.json").read_text())["region_count"] == 7
        assert (tmp_path / "boundary.csv").read_text().startswith("model_id,branch_id,x1,x2\n")

    def test_weights_files_and_window(self, capsys, tmp_path):
        p = tmp_path / "m.txt"
        save_model(GatedModel([0.1, -0.2], 1.0, -0.01, True), p)
        code, out, _ = run(capsys, "regions", "--weights", str(p), "--window=-1,1,-1,1",
                           "--resolution", "400")
        assert code == 0 and out.strip() == "3"

    def test_degenerate_weights(self, capsys, tmp_path):
        p = tmp_path / "zero.txt"
        save_model(GatedModel([0.0, 0.0], 0.0, 1.0, True), p)
        code, _, err = run(capsys, "regions", "--weights", str(p), "--resolution", "50")
        assert code == 5
        assert "error [geometry]" in err

    def test_unknown_fixture(self, capsys):
        assert run(capsys, "regions", "--fixture", "nope")[0] == 2

    def test_nothing_given(self, capsys):
        assert run(capsys, "regions")[0] == 2


class TestXor:
    def test_gated_passes(self, capsys):
        code, out, _ = run(capsys, "xor")
        assert code == 0
        assert "constraints: PASS" in out

    def test_published_weight_signs(self, capsys):
        _, out, _ = run(capsys, "xor")
        published = out.split("published", 1)[1]
        signs = [ln.split("sign")[1].strip() for ln in published.splitlines() if ln.startswith("  y(")]
        assert signs == ["-", "+", "-", "+"]

    def test_plain_fails(self, capsys):
        code, out, _ = run(capsys, "xor", "--model", "plain", "--epochs", "500")
        assert code == 1
        assert "constraints: FAIL" in out


class TestIrisRegression:
    def test_three_class(self, capsys, tmp_path):
        code, out, _ = run(capsys, "iris-regression", "--out", str(tmp_path))
        assert code == 0
        payload = json.loads((tmp_path / "misclassified.json").read_text())
        assert payload["total"] <= 5
        assert f"total misclassified: {payload['total']} of 150" in out
        assert (tmp_path / "boundary.csv").exists()

    def test_two_class_separable(self, capsys, tmp_path):
        code, _, _ = run(capsys, "iris-regression", "--classes", "2", "--out", str(tmp_path))
        assert code == 0
        assert json.loads((tmp_path / "misclassified.json").read_text())["total"] == 0

    def test_epochs_zero(self):
        with pytest.raises(SystemExit) as exc:
            main(["iris-regression", "--epochs", "0"])
        assert exc.value.code == 2

    def test_bad_columns(self, capsys):
        assert run(capsys, "iris-regression", "--columns", "3", "9")[0] == 2


class TestRoc:
    def test_scores_file(self, capsys, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("label,score\n0,0.1\n0,0.4\n1,0.35\n1,0.8\n")
        code, out, _ = run(capsys, "roc", "--scores", str(p), "--out", str(tmp_path))
        assert code == 0
        assert json.loads(out)["auc"] == 0.75
        assert (tmp_path / "roc.csv").read_text().startswith("fpr,tpr,threshold\n")

    def test_bad_header(self, capsys, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("a,b\n0,0.1\n")
        assert run(capsys, "roc", "--scores", str(p))[0] == 3

    def test_missing(self, capsys, tmp_path):
        assert run(capsys, "roc", "--scores", str(tmp_path / "x.csv"))[0] == 3
