"""
End-to-end tests of the command-line interface.

Usage:
    uv run pytest test_cli.py
"""
import json

import numpy as np
import pandas as pd
import pytest
import yaml

from src.cli import main
from src.config.settings import settings
from src.ingestion.manifest import export_dataset
from src.ingestion.synthetic import complementary_views
from src.models.dataset import MultiViewDataset


@pytest.fixture
def manifest(tmp_path):
    return export_dataset(complementary_views(n=40, seed=0), tmp_path / "data")


@pytest.fixture
def config(tmp_path, manifest):
    path = tmp_path / "experiment.yaml"
    path.write_text(
        yaml.safe_dump({"manifest": str(manifest), "n_trees": 4, "runs": 1, "k": 3, "kappa": 3}),
        encoding="utf-8",
    )
    return path


def error_line(capsys) -> str:
    lines = capsys.readouterr().err.strip().splitlines()
    return lines[-1]


# ============================================================================
# validate
# ============================================================================

def test_validate_ok(manifest, capsys):
    assert main(["validate", str(manifest)]) == 0
    out = capsys.readouterr().out
    assert "complementary_views: n=40, Q=2, C=4" in out
    assert "bit0: 5 features" in out


def test_validate_row_mismatch(manifest, capsys):
    view = manifest.parent / "bit1.csv"
    lines = view.read_text(encoding="utf-8").splitlines()
    view.write_text("\n".join(lines[:-1]) + "\n", encoding="utf-8")
    assert main(["validate", str(manifest)]) == 2
    line = error_line(capsys)
    assert line.startswith('error=data_validation reason="')
    assert "view 'bit1' has 39 rows" in line


# ============================================================================
# Usage errors
# ============================================================================

def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"{settings.APP_NAME} {settings.APP_VERSION}"


def test_missing_command_is_a_usage_error(capsys):
    assert main([]) == 1
    assert error_line(capsys).startswith("error=usage")


def test_unknown_method_is_a_usage_error(config):
    assert main(["bench", str(config), "--method", "majority"]) == 1


def test_thread_count_must_be_positive(manifest, capsys):
    assert main(["--threads", "0", "validate", str(manifest)]) == 1
    assert "--threads" in error_line(capsys)


def test_missing_config_is_a_runtime_error(tmp_path, capsys):
    assert main(["bench", str(tmp_path / "missing.yaml")]) == 3
    assert error_line(capsys).startswith("error=parameter")


# ============================================================================
# bench
# ============================================================================

def test_bench_writes_one_row_per_method(config, tmp_path, capsys):
    out = tmp_path / "reports"
    code = main(["bench", str(config), "--method", "avg", "--method", "sw_oob", "--output-dir", str(out)])
    assert code == 0
    frame = pd.read_csv(out / "report.csv")
    assert len(frame) == 2
    assert frame["method"].tolist() == ["avg", "sw_oob"]
    assert "sw_oob vs avg" in capsys.readouterr().out


def test_bench_report_is_identical_across_thread_counts(config, tmp_path):
    first, second = tmp_path / "one", tmp_path / "two"
    assert main(["bench", str(config), "--seed", "7", "--threads", "1", "--output-dir", str(first)]) == 0
    assert main(["bench", str(config), "--seed", "7", "--threads", "2", "--output-dir", str(second)]) == 0
    assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()
    assert json.loads((first / "report.json").read_text(encoding="utf-8"))["seed"] == 7


def test_bench_stratification_failure_is_a_data_error(tmp_path, capsys):
    rng = np.random.default_rng(0)
    labels = np.array([0] * 5 + [1] * 5 + [2])
    dataset = MultiViewDataset.from_arrays([rng.normal(size=(11, 2))], labels, name="singleton")
    manifest = export_dataset(dataset, tmp_path / "singleton")
    config = tmp_path / "singleton.yaml"
    config.write_text(yaml.safe_dump({"manifest": str(manifest), "n_trees": 2, "runs": 1}), encoding="utf-8")
    assert main(["bench", str(config), "--output-dir", str(tmp_path / "out")]) == 2
    assert error_line(capsys).startswith("error=stratification")


# ============================================================================
# train, predict and inspect
# ============================================================================

def test_train_and_predict(config, manifest, tmp_path, capsys):
    model = tmp_path / "model.joblib"
    assert main(["train", str(config), "--method", "sw_ka", "--output", str(model)]) == 0
    assert model.exists()

    predictions = tmp_path / "predictions.csv"
    assert main(["predict", str(model), str(manifest), "--output", str(predictions)]) == 0
    frame = pd.read_csv(predictions)
    assert list(frame.columns) == ["instance_id", "prediction"]
    assert len(frame) == 40
    assert frame["prediction"].between(0, 3).all()
    assert "accuracy=" in capsys.readouterr().err


def test_predict_to_stdout(config, manifest, tmp_path, capsys):
    model = tmp_path / "model.joblib"
    assert main(["train", str(config), "--method", "avg", "--output", str(model)]) == 0
    capsys.readouterr()
    assert main(["predict", str(model), str(manifest)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "instance_id,prediction"
    assert len(lines) == 41


def test_predict_with_wrong_view_dimensions(config, tmp_path, capsys):
    model = tmp_path / "model.joblib"
    assert main(["train", str(config), "--output", str(model)]) == 0
    other = export_dataset(complementary_views(n=20, n_noise=4, seed=1), tmp_path / "wide")
    assert main(["predict", str(model), str(other)]) == 3
    line = error_line(capsys)
    assert line.startswith("error=structural")
    assert "view 'bit0'" in line


def test_dcs_train_predict_and_inspect(config, manifest, tmp_path):
    model = tmp_path / "dcs.joblib"
    assert main(["train", str(config), "--method", "dcs_rfd", "--output", str(model)]) == 0

    transcript = tmp_path / "transcript.jsonl"
    assert main([
        "predict", str(model), str(manifest),
        "--output", str(tmp_path / "p.csv"), "--transcript", str(transcript),
    ]) == 0
    assert len(transcript.read_text(encoding="utf-8").splitlines()) == 40

    out = tmp_path / "inspect"
    assert main(["inspect", str(model), "--output-dir", str(out), "--instances", str(manifest)]) == 0
    for name in ("view_bit0.csv", "view_bit1.csv", "joint.csv", "summary.json", "transcript.jsonl"):
        assert (out / name).exists()
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["pool_size"] == 3
    assert summary["views"] == ["bit0", "bit1"]


def test_inspect_static_model(config, tmp_path):
    model = tmp_path / "model.joblib"
    assert main(["train", str(config), "--method", "sw_3nn", "--output", str(model)]) == 0
    out = tmp_path / "inspect"
    assert main(["inspect", str(model), "--output-dir", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["weight_method"] == "sw_3nn"
    assert sum(summary["weights"]) == pytest.approx(1.0)
    joint = pd.read_csv(out / "joint.csv", index_col=0)
    assert joint.shape == (40, 40)
