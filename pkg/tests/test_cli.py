"""End-to-end tests of the ``bpd`` command line on tiny synthetic runs."""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from bpd_har.cli import main
from bpd_har.gradcheck import PRIMITIVE_CHECKS
from bpd_har.json_util import read_jsonl
from bpd_har.tensor import Tensor
from bpd_har.tensor.core import emit

SMOKE = """\
[train]
lr = 0.001
batch_size = 16
max_epoch = {epochs}
seed = 0
latent_dim = 8
encoder_filters = 4
kernel_size = 3

[data]
source = synthetic

[synth]
class_count = 3
subject_count = 3
channels = {channels}
window_length = 32
segments_per_subject_per_class = 6
"""


def _config(directory: Path, name: str = "run.ini", epochs: int = 2, channels: int = 2) -> Path:
    path = directory / name
    path.write_text(SMOKE.format(epochs=epochs, channels=channels), encoding="utf-8")
    return path


def _invoke(*args: str):
    return CliRunner().invoke(main, list(args), catch_exceptions=False)


def _bad_square_case(rng: np.random.Generator):
    def fn(x: Tensor) -> Tensor:
        return emit("bad_square", (x,), (x.data * x.data,), lambda gs: (gs[0] * 3.0 * x.data,))[0]

    return fn, [rng.standard_normal((2, 2))]


@pytest.fixture
def trained(tmp_path) -> Path:
    """Run directory of a two-epoch BPD training run."""
    out = tmp_path / "train"
    result = _invoke("train", "--config", str(_config(tmp_path)), "--out", str(out))
    assert result.exit_code == 0, result.output
    return out


# ============================================================================
# TRAIN AND EVAL
# ============================================================================


class TestTrain:
    """``bpd train`` and ``bpd eval``."""

    def test_run_directory_contents(self, trained):
        for name in ("resolved_config.ini", "metadata.json", "epochs.jsonl", "checkpoint.npz", "diagnostics.json"):
            assert (trained / name).exists(), name
        logs = read_jsonl(trained / "epochs.jsonl")
        assert [log["epoch"] for log in logs] == [1, 2]
        metadata = json.loads((trained / "metadata.json").read_text())
        assert metadata["command"] == "train"
        assert metadata["seed"] == 0

    def test_rerun_reproduces_losses(self, trained, tmp_path):
        again = tmp_path / "again"
        result = _invoke("train", "--config", str(tmp_path / "run.ini"), "--out", str(again))
        assert result.exit_code == 0, result.output
        assert (again / "epochs.jsonl").read_bytes() == (trained / "epochs.jsonl").read_bytes()

    def test_misspelled_key_fails(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[train]\nlearningrate = 0.1\n", encoding="utf-8")
        result = _invoke("train", "--config", str(path), "--out", str(tmp_path / "never"))
        assert result.exit_code != 0
        assert "did you mean 'lr'" in result.output
        assert not (tmp_path / "never").exists()

    def test_eval_writes_report(self, trained, tmp_path):
        out = tmp_path / "eval"
        result = _invoke(
            "eval", "--checkpoint", str(trained / "checkpoint.npz"), "--config", str(tmp_path / "run.ini"),
            "--out", str(out),
        )
        assert result.exit_code == 0, result.output
        report = json.loads((out / "report.json").read_text())
        assert len(report["rows"]) == 3
        assert "Avg." in (out / "report.txt").read_text()


# ============================================================================
# PROTOCOLS
# ============================================================================


class TestProtocols:
    """``bpd loso`` and ``bpd holdout``."""

    def test_loso_compares_models(self, tmp_path):
        out = tmp_path / "loso"
        result = _invoke(
            "loso", "--config", str(_config(tmp_path, epochs=1)), "--out", str(out),
            "--model", "baseline", "--model", "bpd",
        )
        assert result.exit_code == 0, result.output
        for name in ("report-baseline.json", "report-bpd.json", "epochs-bpd.jsonl", "report.txt"):
            assert (out / name).exists(), name
        header = (out / "report.txt").read_text().splitlines()[0].split()
        assert header == ["Subject", "baseline", "bpd"]
        folds = {line["fold"] for line in read_jsonl(out / "epochs-bpd.jsonl")}
        assert folds == {"s1", "s2", "s3"}

    def test_loso_reports_are_reproducible(self, tmp_path):
        config = _config(tmp_path, epochs=1)
        for out in ("a", "b"):
            assert _invoke("loso", "--config", str(config), "--out", str(tmp_path / out)).exit_code == 0
        for name in ("report-bpd.json", "epochs-bpd.jsonl", "report.txt", "resolved_config.ini"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name

    def test_loso_on_sensor_manifest(self, tmp_path):
        data = tmp_path / "pamap2"
        data.mkdir()
        rng = np.random.default_rng(0)
        for sid in ("101", "102"):
            codes = ["0"] * 40 + ["1"] * 200 + ["4"] * 200 + ["0"] * 40
            rows = [
                f"{t / 100:.2f} " + " ".join(f"{v:.4f}" for v in rng.standard_normal(4)) + f" {code}"
                for t, code in enumerate(codes)
            ]
            (data / f"subject{sid}.dat").write_text("\n".join(rows) + "\n", encoding="utf-8")
        (data / "manifest.ini").write_text(
            "[dataset]\nname = PAMAP2\nsampling_rate = 100\nchannels = 4\nnull_label = 0\n"
            "[labels]\n1 = lying\n4 = walking\n"
            "[subjects]\n101 = subject101.dat\n102 = subject102.dat\n",
            encoding="utf-8",
        )
        config = tmp_path / "pamap2.ini"
        config.write_text(
            "[train]\nmax_epoch = 1\nbatch_size = 16\nlatent_dim = 8\nencoder_filters = 4\nkernel_size = 3\n"
            "[data]\nmanifest = pamap2/manifest.ini\nwindow_length = 32\noverlap = 0.5\n",
            encoding="utf-8",
        )
        out = tmp_path / "run"
        result = _invoke("loso", "--config", str(config), "--out", str(out))
        assert result.exit_code == 0, result.output
        lines = (out / "report.txt").read_text().splitlines()
        assert [line.split()[0] for line in lines[:5]] == ["Subject", "-------", "101", "102", "Avg."]
        report = json.loads((out / "report-bpd.json").read_text())
        assert report["label_names"] == {"1": "lying", "2": "walking"}

    def test_missing_manifest_leaves_no_run_dir(self, tmp_path):
        path = tmp_path / "real.ini"
        path.write_text("[data]\nmanifest = nowhere/manifest.ini\n", encoding="utf-8")
        out = tmp_path / "run"
        result = _invoke("loso", "--config", str(path), "--out", str(out))
        assert result.exit_code != 0
        assert "manifest" in result.output
        assert not out.exists()

    def test_holdout_needs_test_subjects(self, tmp_path):
        result = _invoke("holdout", "--config", str(_config(tmp_path, epochs=1)), "--out", str(tmp_path / "h"))
        assert result.exit_code != 0
        assert "test_subjects" in result.output

    def test_holdout_single_row(self, tmp_path):
        path = _config(tmp_path, epochs=1)
        path.write_text(path.read_text() + "\n[protocol]\ntest_subjects = s3\n", encoding="utf-8")
        out = tmp_path / "holdout"
        result = _invoke("holdout", "--config", str(path), "--out", str(out))
        assert result.exit_code == 0, result.output
        report = json.loads((out / "report-bpd.json").read_text())
        assert [row["subjects"] for row in report["rows"]] == [["s3"]]


# ============================================================================
# SYNTH, GRADCHECK AND FEATURE EXPORT
# ============================================================================


class TestTools:
    """Auxiliary commands."""

    def test_synth_is_byte_identical(self, tmp_path):
        config = _config(tmp_path)
        for out in ("a", "b"):
            assert _invoke("synth", "--config", str(config), "--out", str(tmp_path / out)).exit_code == 0
        names = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert names == ["manifest.ini", "s1.csv", "s2.csv", "s3.csv"]
        for name in names:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_synth_seed_override(self, tmp_path):
        config = _config(tmp_path)
        _invoke("synth", "--config", str(config), "--out", str(tmp_path / "a"))
        _invoke("synth", "--config", str(config), "--out", str(tmp_path / "b"), "--seed", "5")
        assert (tmp_path / "a" / "s1.csv").read_bytes() != (tmp_path / "b" / "s1.csv").read_bytes()

    def test_gradcheck_passes(self):
        result = _invoke("gradcheck", "--seeds", "1")
        assert result.exit_code == 0, result.output
        assert "0 failed" in result.output

    def test_gradcheck_reports_failure(self, monkeypatch):
        monkeypatch.setitem(PRIMITIVE_CHECKS, "bad_square", _bad_square_case)
        result = _invoke("gradcheck", "--seeds", "1")
        assert result.exit_code == 1
        assert "FAIL" in result.output.splitlines()[1]

    def test_export_features(self, trained, tmp_path):
        out = tmp_path / "features.csv"
        result = _invoke(
            "export-features", "--checkpoint", str(trained / "checkpoint.npz"),
            "--config", str(tmp_path / "run.ini"), "--out", str(out), "--zsig",
        )
        assert result.exit_code == 0, result.output
        table = pd.read_csv(out)
        assert table.shape == (54, 3 + 8)

    def test_export_features_channel_mismatch(self, trained, tmp_path):
        other = _config(tmp_path, name="wide.ini", channels=3)
        result = _invoke(
            "export-features", "--checkpoint", str(trained / "checkpoint.npz"),
            "--config", str(other), "--out", str(tmp_path / "f.csv"),
        )
        assert result.exit_code != 0
        assert "channels" in result.output
        assert not (tmp_path / "f.csv").exists()
