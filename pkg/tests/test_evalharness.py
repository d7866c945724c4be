# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Tests for replay evaluation, bootstrap intervals and ablation sweeps."""

import csv

import numpy as np
import pytest
from conftest import as_dataset, make_two_link, tiny_config

from geansim import constants, evalharness, gean
from geansim.errors import HorizonError, InputRangeError, ModelMismatchError
from geansim.models import Trajectory


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def head(traj, start, length):
    stop = start + length
    return Trajectory(
        dt=traj.dt, t=traj.t[start:stop], q=traj.q[start:stop], u=traj.u[start:stop]
    )


def test_label_playback_reproduces_the_log(arm, dataset):
    report = evalharness.replay_error(
        arm,
        evalharness.LabelProvider(arm),
        dataset,
        horizons=(1, 99),
        bootstrap_resamples=100,
        include_baseline=False,
    )
    assert report.mean("labels", 1) < 1e-7
    assert report.mean("labels", 99) < 1e-7


def test_zero_torque_one_step_error_matches_normalizer(arm, dataset):
    short = as_dataset(
        arm,
        [head(traj, offset, 3) for traj in dataset.trajectories for offset in (0, 40, 80)],
    )
    c_table = gean.zero_torque_normalizers(arm, short, 1)
    report = evalharness.replay_error(
        arm, evalharness.ZeroTorqueProvider(), short, horizons=(1,), bootstrap_resamples=100
    )
    assert report.mean("zero-torque", 1) == pytest.approx(np.rad2deg(c_table[0]).mean(), rel=1e-9)
    # The baseline is not added twice.
    assert [row["provider"] for row in report.rows] == ["zero-torque"]


def test_zero_torque_one_step_error_from_a_later_start(arm, dataset):
    start = 3
    report = evalharness.replay_error(
        arm,
        evalharness.ZeroTorqueProvider(window=start),
        dataset,
        horizons=(1,),
        bootstrap_resamples=100,
    )
    assert report.start == start
    q_win = np.stack([traj.q[start - 1 : start + 2] for traj in dataset.trajectories])
    expected = np.rad2deg(gean.zero_torque_errors(arm, q_win, 1)).mean()
    assert report.mean("zero-torque", 1) == pytest.approx(expected, rel=1e-9)


def test_replay_rows_and_baseline(arm, dataset, tiny_model):
    report = evalharness.replay_error(
        arm, tiny_model, dataset, horizons=(1, 20), bootstrap_resamples=200, seed=3
    )
    assert report.start == tiny_model.window
    assert {(r["provider"], r["horizon_steps"]) for r in report.rows} == {
        ("gean", 1),
        ("gean", 20),
        ("zero-torque", 1),
        ("zero-torque", 20),
    }
    for row in report.rows:
        assert row["metric"] == "replay_mae"
        assert row["n_traj"] == len(dataset)
        assert row["ci_lo"] <= row["mean_deg"] <= row["ci_hi"]
    assert report.per_trajectory["gean"].shape == (2, len(dataset))


def test_replay_error_checks_arm(dataset, tiny_model):
    with pytest.raises(ModelMismatchError):
        evalharness.replay_error(make_two_link(dt=0.001), tiny_model, dataset, horizons=(1,))


def test_replay_error_rejects_long_horizon(arm, dataset, tiny_model):
    with pytest.raises(HorizonError):
        evalharness.replay_error(arm, tiny_model, dataset, horizons=(1, 100))


def test_replay_error_rejects_non_positive_horizon(arm, dataset, tiny_model):
    with pytest.raises(InputRangeError):
        evalharness.replay_error(arm, tiny_model, dataset, horizons=(0,))


def test_replay_trajectory_needs_history_room(arm, trajectory):
    torque = evalharness.ZeroTorqueProvider().for_trajectory(trajectory, None)
    with pytest.raises(InputRangeError):
        evalharness.replay_trajectory(arm, torque, trajectory, window=3, start=2, steps=5)
    q = evalharness.replay_trajectory(arm, torque, trajectory, window=3, start=3, steps=5)
    assert q.shape == (6, 2)
    np.testing.assert_array_equal(q[0], trajectory.q[3])


def test_ensemble_replay_is_seeded_and_independent_of_jobs(arm, dataset, tiny_ensemble):
    kwargs = dict(horizons=(1, 30), bootstrap_resamples=100, seed=5, include_baseline=False)
    serial = evalharness.replay_error(arm, tiny_ensemble, dataset, jobs=1, **kwargs)
    parallel = evalharness.replay_error(arm, tiny_ensemble, dataset, jobs=2, **kwargs)
    np.testing.assert_array_equal(
        serial.per_trajectory["ensemble"], parallel.per_trajectory["ensemble"]
    )


def test_bootstrap_ci():
    values = np.random.default_rng(0).exponential(size=40)
    mean, lo, hi = evalharness.bootstrap_ci(values, 2000, seed=1)
    assert mean == pytest.approx(values.mean())
    assert lo < mean < hi
    assert evalharness.bootstrap_ci(values, 2000, seed=1) == (mean, lo, hi)
    assert evalharness.bootstrap_ci(np.array([2.5]), 2000, seed=1) == (2.5, 2.5, 2.5)


def test_bootstrap_interval_narrows_with_more_trajectories():
    values = np.random.default_rng(2).exponential(size=320)
    widths = []
    for n in (20, 80, 320):
        _, lo, hi = evalharness.bootstrap_ci(values[:n], 2000, seed=0)
        widths.append(hi - lo)
    assert widths[0] > widths[1] > widths[2]


def test_bootstrap_ci_of_constant_values_is_degenerate():
    mean, lo, hi = evalharness.bootstrap_ci(np.full(10, 0.1), 500, seed=0)
    assert lo <= mean <= hi
    assert hi - lo < 1e-15


def test_report_csv_files(tmp_path, arm, dataset, tiny_model):
    report = evalharness.replay_error(
        arm, tiny_model, dataset, horizons=(1, 10), bootstrap_resamples=100
    )
    report.write_csv(tmp_path / "replay.csv")
    rows = read_csv(tmp_path / "replay.csv")
    assert list(rows[0]) == list(constants.REPORT_COLUMNS)
    assert len(rows) == 4
    assert float(rows[0]["mean_deg"]) == report.rows[0]["mean_deg"]

    report.write_trajectory_csv(tmp_path / "per_traj.csv")
    rows = read_csv(tmp_path / "per_traj.csv")
    assert list(rows[0]) == ["provider", "trajectory", "h1_deg", "h10_deg"]
    assert len(rows) == 2 * len(dataset)


def test_heldout_disagreement(dataset, tiny_ensemble, tiny_model):
    assert evalharness.heldout_disagreement(tiny_ensemble, dataset) > 0
    single = gean.Ensemble(members=[tiny_model])
    assert evalharness.heldout_disagreement(single, dataset) == 0.0


def test_ablation_table_select(arm, dataset, tiny_model):
    report = evalharness.replay_error(
        arm, tiny_model, dataset, horizons=(1,), bootstrap_resamples=50
    )
    table = evalharness.AblationTable(["history_length"])
    table.add(report, history_length=2)
    table.add(report, history_length=3)
    assert table.columns == ["history_length"] + list(constants.REPORT_COLUMNS)
    picked = table.select("gean", 1, history_length=3)
    assert len(picked) == 1 and picked[0]["history_length"] == 3


def test_ablate_loss(tmp_path, arm, dataset):
    table = evalharness.ablate_loss(
        tiny_config(epochs=1),
        dataset,
        arm,
        dataset,
        seeds=(0, 1),
        horizons=(1, 10),
        bootstrap_resamples=50,
    )
    assert len(table.rows) == 2 * 2 * 2
    assert {row["loss_kind"] for row in table.rows} == {"torque", "position"}
    assert {row["provider"] for row in table.rows} == {"gean"}
    table.write_csv(tmp_path / "loss.csv")
    assert list(read_csv(tmp_path / "loss.csv")[0])[:2] == ["loss_kind", "seed"]


def test_ablate_history_replays_from_a_common_start(arm, dataset):
    table = evalharness.ablate_history(
        (1, 2),
        (1, 2),
        tiny_config(epochs=1),
        dataset,
        arm,
        dataset,
        horizons=(5,),
        bootstrap_resamples=50,
    )
    assert len(table.rows) == 4 * 2
    cells = {(r["history_length"], r["history_stride"]) for r in table.rows}
    assert cells == {(1, 1), (1, 2), (2, 1), (2, 2)}
    # Zero-torque rows share the start, so they agree across cells.
    baseline = {r["mean_deg"] for r in table.rows if r["provider"] == "zero-torque"}
    assert len(baseline) == 1


def test_ablate_rollout_length(arm, dataset):
    with pytest.warns(UserWarning, match="skipped"):
        table = evalharness.ablate_rollout_length(
            (1, 2),
            tiny_config(epochs=1),
            dataset,
            arm,
            dataset,
            horizons=(5,),
            bootstrap_resamples=50,
        )
    assert sorted({r["rollout_length"] for r in table.rows}) == [1, 2]


def test_ablate_dataset_size(arm, plant, reset, dataset):
    table = evalharness.ablate_dataset_size(
        (4, 8),
        (0,),
        tiny_config(epochs=1),
        plant,
        arm,
        test_set=dataset,
        horizons=(5,),
        bootstrap_resamples=50,
        data_kwargs=dict(traj_duration=0.1, knot_interval=0.05, reset=reset),
    )
    assert [r["dataset_size"] for r in table.rows] == [4, 4, 8, 8]
    assert all(r["mean_disagreement"] > 0 for r in table.rows)
    assert "mean_disagreement" in table.columns

