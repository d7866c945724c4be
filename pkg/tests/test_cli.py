# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""End-to-end tests for the geansim command line on a tiny configuration."""

import csv
import json

import pytest

from geansim import __version__, datagen, gean
from geansim.cli import main

TINY_CONFIG = """
plant:
  preset: easy
data:
  n_traj: 4
  n_test_traj: 2
  duration: 0.1
  knot_interval: 0.05
gean:
  history_length: 1
  hidden_layers: 1
  hidden_width: 4
  epochs: 1
  batch_size: 64
  ensemble_size: {ensemble_size}
  loss_kind: torque
eval:
  horizons: [1, 10]
  bootstrap_resamples: 50
  seeds: [0]
env:
  episode_seconds: 0.05
  settle_steps: 10
  planning_horizon: 1
  n_candidates: 2
io:
  out_dir: out
"""


def write_config(tmp_path, ensemble_size=2, name="run.yml"):
    path = tmp_path / name
    path.write_text(TINY_CONFIG.format(ensemble_size=ensemble_size))
    return str(path)


def read_json(path):
    return json.loads(path.read_text())


@pytest.fixture
def data_files(tmp_path):
    config = write_config(tmp_path)
    assert main(["gen-data", config, "-q"]) == 0
    assert main(["gen-data", config, "--test", "-q"]) == 0
    out = tmp_path / "out"
    return config, out / "dataset.gsd", out / "test.gsd"


def test_gen_data_writes_dataset_and_manifest(tmp_path, capsys):
    config = write_config(tmp_path)
    assert main(["gen-data", config]) == 0
    assert "seed: 0" in capsys.readouterr().out
    dataset = datagen.load_dataset(tmp_path / "out" / "dataset.gsd")
    assert len(dataset) == 4
    manifest = read_json(tmp_path / "out" / "dataset.gsd.manifest.json")
    assert manifest["command"] == "gen-data"
    assert manifest["seed"] == 0
    assert manifest["version"] == __version__
    assert len(manifest["config_sha256"]) == 64


def test_test_set_uses_a_disjoint_seed(data_files):
    _, data, test = data_files
    assert read_json(test.with_name("test.gsd.manifest.json"))["seed"] == 10_007
    assert len(datagen.load_dataset(test)) == 2
    assert len(datagen.load_dataset(data)) == 4


def test_train_eval_and_env_run(tmp_path, data_files, capsys):
    config, data, test = data_files
    out = tmp_path / "out"
    assert main(["train", config, "--data", str(data), "-q"]) == 0
    checkpoint = out / "gean-torque.gck"
    assert len(gean.load_ensemble(checkpoint)) == 2
    with open(out / "gean-torque.curve.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == ["member", "epoch", "train_loss", "val_loss"]
    assert len(rows) == 2 * 2

    args = ["eval", config, "--ensemble", str(checkpoint), "--test-data", str(test)]
    assert main(args + ["--per-trajectory", "-q"]) == 0
    with open(out / "replay.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert {row["provider"] for row in rows} == {"ensemble", "zero-torque"}
    assert (out / "replay.trajectories.csv").exists()
    assert read_json(out / "replay.csv.manifest.json")["command"] == "eval"

    capsys.readouterr()
    run_args = ["env-run", config, "--ensemble", str(checkpoint), "--episodes", "2"]
    assert main(run_args + ["--controller", "zero", "-q"]) == 0
    assert "success rate" in capsys.readouterr().out
    episodes = out / "env-zero"
    assert (episodes / "episode000.csv").exists() and (episodes / "episode001.csv").exists()
    assert read_json(episodes / "summary.json")["episodes"] == 2
    assert read_json(episodes / "manifest.json")["controller"] == "zero"


def test_train_single_model_and_evaluate(tmp_path, data_files):
    _, data, test = data_files
    config = write_config(tmp_path, ensemble_size=1, name="single.yml")
    model_path = tmp_path / "single.gck"
    assert main(["train", config, "--data", str(data), "--out", str(model_path), "-q"]) == 0
    assert gean.load_model(model_path).loss_kind == "torque"
    assert (tmp_path / "single.curve.csv").exists()
    args = ["eval", config, "--model", str(model_path), "--test-data", str(test), "-q"]
    assert main(args + ["--out", str(tmp_path / "single-replay.csv")]) == 0


def test_loss_override(tmp_path, data_files):
    config, data, _ = data_files
    assert main(["train", config, "--data", str(data), "--loss", "position", "-q"]) == 0
    ensemble = gean.load_ensemble(tmp_path / "out" / "gean-position.gck")
    assert ensemble.members[0].loss_kind == "position"


def test_ablate_loss(tmp_path, data_files):
    config, data, test = data_files
    args = ["ablate", config, "--axis", "loss", "--data", str(data), "--test-data", str(test)]
    assert main(args + ["-q"]) == 0
    with open(tmp_path / "out" / "ablate-loss.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert {row["loss_kind"] for row in rows} == {"torque", "position"}
    assert "zero-torque" not in {row["provider"] for row in rows}
    assert read_json(tmp_path / "out" / "ablate-loss.csv.manifest.json")["axis"] == "loss"


def test_ablate_requires_data_for_model_axes(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["ablate", write_config(tmp_path), "--axis", "history"])
    assert info.value.code == 2


def test_train_requires_data(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["train", write_config(tmp_path)])
    assert info.value.code == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_config_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.yml"
    path.write_text("gean:\n  hidden_widht: 4\n")
    assert main(["gen-data", str(path)]) == 3
    assert "error [config]" in capsys.readouterr().err


def test_parse_error_exit_code(tmp_path):
    config = write_config(tmp_path)
    bad = tmp_path / "bad.gsd"
    bad.write_text("not a dataset\n")
    assert main(["train", config, "--data", str(bad), "-q"]) == 4


def test_dataset_for_another_arm_exit_code(tmp_path, dataset):
    config = write_config(tmp_path)
    other = tmp_path / "two_link.gsd"
    datagen.save_dataset(dataset, other)
    assert main(["train", config, "--data", str(other), "-q"]) == 5


def test_missing_input_file_exit_code(tmp_path):
    config = write_config(tmp_path)
    assert main(["train", config, "--data", str(tmp_path / "missing.gsd"), "-q"]) == 1
