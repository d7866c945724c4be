# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Tests for GeAN prediction, the three losses, training, ensembles and checkpoints."""

from dataclasses import replace

import numpy as np
import pytest
from conftest import as_dataset, constant_trajectory, make_two_link, tiny_config

from geansim import dynamics, features, gean
from geansim.errors import (
    FormatVersionError,
    ModelMismatchError,
    ParseError,
    ShapeError,
    TrainingDivergedError,
    ZeroNormalizerError,
)
from geansim.models import ArmModel, DatasetStats, Trajectory
from geansim.network import Mlp, flatten


def directional_check(model, loss_fn, seed=0, eps=1e-5):
    """Compare grad . d with a central difference of the loss along a random direction d."""
    flat = model.network.get_flat()
    direction = np.random.default_rng(seed).normal(size=flat.size)
    _, grads = loss_fn(model)
    analytic = float(flatten(grads) @ direction)

    def loss_at(params):
        shifted = replace(model, network=model.network.copy())
        shifted.network.set_flat(params)
        return loss_fn(shifted)[0]

    numeric = (loss_at(flat + eps * direction) - loss_at(flat - eps * direction)) / (2 * eps)
    return analytic, numeric


def torque_batch(model, arm, dataset, size=20):
    feats, torques = features.labelled_windows(
        arm, dataset.trajectories, model.history_length, model.history_stride
    )
    return (
        features.normalize(feats[:size], model.stats),
        features.standardize_torque(torques[:size], model.stats),
    )


def test_predict_with_zero_output_layer_returns_torque_mean(tiny_model, trajectory):
    tiny_model.network.weights[-1][...] = 0.0
    tiny_model.network.biases[-1][...] = 0.0
    window = tiny_model.window + 1
    tau = gean.predict_torque(tiny_model, trajectory.q[:window], trajectory.u[:window])
    np.testing.assert_array_equal(tau, tiny_model.stats.torque_mean)


def test_predict_is_deterministic_and_batched(tiny_model, trajectory):
    w = tiny_model.window + 1
    single = tiny_model.predict(trajectory.q[:w], trajectory.u[:w])
    batch = tiny_model.predict(
        np.stack([trajectory.q[:w], trajectory.q[1 : w + 1]]),
        np.stack([trajectory.u[:w], trajectory.u[1 : w + 1]]),
    )
    np.testing.assert_array_equal(single, tiny_model.predict(trajectory.q[:w], trajectory.u[:w]))
    np.testing.assert_allclose(batch[0], single, rtol=1e-12)


def test_predict_rejects_wrong_joint_count(tiny_model):
    with pytest.raises(ShapeError):
        gean.predict_torque(tiny_model, np.zeros((3, 3)), np.zeros((3, 3)))


def test_check_arm(tiny_model):
    tiny_model.check_arm(make_two_link())
    with pytest.raises(ModelMismatchError):
        tiny_model.check_arm(make_two_link(dt=0.001))


def test_torque_loss_zero_for_perfect_predictions(tiny_model, arm, dataset):
    x, _ = torque_batch(tiny_model, arm, dataset)
    loss, grads = gean.torque_loss_grad(tiny_model, x, tiny_model.network(x))
    assert loss == 0.0
    assert np.all(flatten(grads) == 0.0)


def test_torque_loss_gradient_of_linear_network():
    stats = DatasetStats(1, 1, np.zeros(4), np.ones(4), np.zeros(1), np.ones(1))
    w = np.array([[0.5, -1.0, 2.0, 0.25]])
    model = gean.GeanModel(
        network=Mlp(weights=[w.copy()], biases=[np.zeros(1)]), stats=stats, dt=0.01, n_joints=1
    )
    x = np.array([[1.0, 2.0, -1.0, 4.0]])
    y = np.array([[0.5]])
    loss, grads = gean.torque_loss_grad(model, x, y)
    residual = w @ x[0] - y[0]
    assert loss == pytest.approx(float(residual[0] ** 2))
    np.testing.assert_allclose(grads[0], 2.0 * np.outer(residual, x[0]))
    np.testing.assert_allclose(grads[1], 2.0 * residual)


def test_torque_loss_gradient_matches_finite_differences(tiny_model, arm, dataset):
    x, y = torque_batch(tiny_model, arm, dataset)
    analytic, numeric = directional_check(tiny_model, lambda m: gean.torque_loss_grad(m, x, y))
    assert analytic == pytest.approx(numeric, rel=1e-6)


def test_position_loss_gradient_matches_finite_differences(tiny_model, arm, dataset):
    q_win, u_win, _ = gean.rollout_windows(dataset.trajectories, tiny_model.window, 1)
    q_win, u_win = q_win[:24], u_win[:24]
    for seed in range(3):
        analytic, numeric = directional_check(
            tiny_model, lambda m: gean.position_loss_grad(m, arm, q_win, u_win), seed=seed
        )
        assert analytic == pytest.approx(numeric, rel=1e-5)


def test_position_loss_gradient_of_deeper_network_matches_each_parameter(arm, dataset):
    config = tiny_config(hidden_layers=2, hidden_width=8)
    stats = features.compute_stats(
        arm, dataset.trajectories, config.history_length, config.history_stride
    )
    model = gean.initialize_model(config, arm, stats, np.random.default_rng(4))
    q_win, u_win, _ = gean.rollout_windows(dataset.trajectories, model.window, 1)
    q_win, u_win = q_win[:24], u_win[:24]
    _, grads = gean.position_loss_grad(model, arm, q_win, u_win)
    analytic = flatten(grads)
    flat = model.network.get_flat()
    assert len(model.network.weights) == 3

    def loss_at(params):
        shifted = replace(model, network=model.network.copy())
        shifted.network.set_flat(params)
        return gean.position_loss_grad(shifted, arm, q_win, u_win)[0]

    eps = 1e-5
    numeric = np.zeros_like(flat)
    for i in range(flat.size):
        up, down = flat.copy(), flat.copy()
        up[i] += eps
        down[i] -= eps
        numeric[i] = (loss_at(up) - loss_at(down)) / (2 * eps)
    np.testing.assert_allclose(
        analytic, numeric, rtol=1e-4, atol=1e-6 * np.max(np.abs(analytic))
    )


def test_multistep_loss_gradient_matches_finite_differences(tiny_model, arm, dataset):
    c_table = gean.zero_torque_normalizers(arm, dataset, 3)
    q_win, u_win, _ = gean.rollout_windows(dataset.trajectories, tiny_model.window, 3)
    q_win, u_win = q_win[::7][:16], u_win[::7][:16]
    for seed in range(3):
        analytic, numeric = directional_check(
            tiny_model,
            lambda m: gean.multi_step_loss_grad(m, arm, q_win, u_win, 3, c_table),
            seed=seed,
        )
        assert analytic == pytest.approx(numeric, rel=1e-4)


def test_multistep_with_one_step_and_unit_table_is_position_loss(tiny_model, arm, dataset):
    q_win, u_win, _ = gean.rollout_windows(dataset.trajectories, tiny_model.window, 1)
    pos_loss, pos_grads = gean.position_loss_grad(tiny_model, arm, q_win, u_win)
    ms_loss, ms_grads = gean.multi_step_loss_grad(
        tiny_model, arm, q_win, u_win, 1, np.ones((1, 2))
    )
    assert pos_loss == ms_loss
    np.testing.assert_array_equal(flatten(pos_grads), flatten(ms_grads))


def test_multistep_rejects_bad_table(tiny_model, arm, dataset):
    q_win, u_win, _ = gean.rollout_windows(dataset.trajectories, tiny_model.window, 2)
    with pytest.raises(ShapeError):
        gean.multi_step_loss_grad(tiny_model, arm, q_win, u_win, 2, np.ones((3, 2)))


def test_position_loss_reduces_to_scaled_torque_loss_for_unit_inertia():
    # One link with M = 1, no gravity and dt = 1: position error equals torque error.
    arm = ArmModel(
        link_length=[1.0], com_offset=[0.0], mass=[1.0], inertia_zz=[1.0], gravity=0.0, dt=1.0
    )
    rng = np.random.default_rng(5)
    length = 12
    traj = Trajectory(
        dt=1.0,
        t=np.arange(length, dtype=float),
        q=np.cumsum(rng.normal(scale=0.1, size=(length, 1)), axis=0),
        u=rng.uniform(-1, 1, size=(length, 1)),
    )
    stats = features.compute_stats(arm, [traj], 1, 1)
    config = tiny_config(history_length=1)
    model = gean.initialize_model(config, arm, stats, np.random.default_rng(2))

    feats, torques = features.labelled_windows(arm, [traj], 1, 1)
    torque_loss, _ = gean.torque_loss_grad(
        model, features.normalize(feats, stats), features.standardize_torque(torques, stats)
    )
    q_win, u_win, _ = gean.rollout_windows([traj], model.window, 1)
    position_loss, _ = gean.position_loss_grad(model, arm, q_win, u_win, grad=False)
    assert q_win.shape[0] == feats.shape[0]
    assert position_loss == pytest.approx(stats.torque_std[0] ** 2 * torque_loss, rel=1e-8)


def test_position_error_identity(arm):
    rng = np.random.default_rng(0)
    q = rng.uniform(-1.0, 1.0, size=(50, 2))
    qdot = rng.normal(size=(50, 2))
    tau = rng.normal(size=(50, 2))
    tau_hat = rng.normal(size=(50, 2))
    residual = gean.position_error_identity(arm, q, qdot, tau, tau_hat)
    assert np.max(np.abs(residual)) < 1e-10


def test_rollout_windows_count_skipped_samples(dataset):
    q_win, u_win, skipped = gean.rollout_windows(dataset.trajectories, 2, 3)
    per_traj = len(dataset.trajectories[0]) - 3 - 2
    assert q_win.shape == (8 * per_traj, 2 + 3 + 1, 2)
    assert u_win.shape == (8 * per_traj, 2 + 3, 2)
    assert skipped == 8 * 2


def test_zero_torque_normalizers_one_step_is_average_error(arm, dataset):
    table = gean.zero_torque_normalizers(arm, dataset, 1)
    errors = []
    for traj in dataset.trajectories:
        for t in range(1, len(traj) - 1):
            qdot = (traj.q[t] - traj.q[t - 1]) / arm.dt
            q_next, _ = dynamics.step_arrays(arm, traj.q[t], qdot, np.zeros(2))
            errors.append(np.abs(q_next - traj.q[t + 1]))
    np.testing.assert_allclose(table[0], np.mean(errors, axis=0), rtol=1e-12)


def test_zero_torque_normalizers_are_positive_and_deterministic(arm, dataset):
    table = gean.zero_torque_normalizers(arm, dataset, 4)
    assert table.shape == (4, 2)
    assert np.all(table > 0)
    np.testing.assert_array_equal(table, gean.zero_torque_normalizers(arm, dataset, 4))


def test_zero_torque_normalizers_reject_static_data():
    arm = make_two_link(gravity=0.0)
    static = as_dataset(arm, [constant_trajectory(), constant_trajectory(value=-0.2)])
    with pytest.raises(ZeroNormalizerError):
        gean.zero_torque_normalizers(arm, static, 2)


def test_zero_torque_normalizers_reject_short_data(arm):
    short = as_dataset(arm, [constant_trajectory(length=3)])
    with pytest.raises(ZeroNormalizerError):
        gean.zero_torque_normalizers(arm, short, 5)


def test_train_with_no_epochs_returns_initial_model(arm, dataset):
    config = tiny_config(epochs=0, loss_kind="torque")
    model = gean.train(config, arm, dataset)
    initial = gean.initialize_model(config, arm, model.stats, np.random.default_rng(config.seed))
    np.testing.assert_array_equal(model.network.get_flat(), initial.network.get_flat())
    assert model.curve.shape == (1, 3)


@pytest.mark.parametrize("kind", ["torque", "position"])
def test_train_records_curve_and_keeps_best_epoch(arm, dataset, kind):
    model = gean.train(tiny_config(epochs=3, loss_kind=kind), arm, dataset)
    np.testing.assert_array_equal(model.curve[:, 0], [0, 1, 2, 3])
    assert np.all(np.isfinite(model.curve))
    rows = gean.curve_rows(model)
    assert [row["epoch"] for row in rows] == [0, 1, 2, 3]
    assert set(rows[0]) == set(gean.CURVE_COLUMNS)


def test_train_is_deterministic(arm, dataset):
    config = tiny_config(epochs=2, loss_kind="position")
    a = gean.train(config, arm, dataset)
    b = gean.train(config, arm, dataset)
    np.testing.assert_array_equal(a.network.get_flat(), b.network.get_flat())
    np.testing.assert_array_equal(a.curve, b.curve)


def test_train_position_equals_unit_one_step_multistep(arm, dataset):
    position = gean.train(tiny_config(epochs=2, loss_kind="position"), arm, dataset)
    multistep = gean.train(
        tiny_config(epochs=2, loss_kind="multistep", rollout_length=1),
        arm,
        dataset,
        c_table=np.ones((1, 2)),
    )
    np.testing.assert_array_equal(position.network.get_flat(), multistep.network.get_flat())
    np.testing.assert_array_equal(position.curve, multistep.curve)


def test_train_multistep_warns_about_skipped_samples(arm, dataset):
    with pytest.warns(UserWarning, match="skipped"):
        model = gean.train(
            tiny_config(epochs=1, loss_kind="multistep", rollout_length=3), arm, dataset
        )
    assert model.rollout_length == 3


def test_train_aborts_on_non_finite_loss(arm, dataset, monkeypatch):
    monkeypatch.setattr(gean, "torque_loss_grad", lambda *args, **kwargs: (float("nan"), None))
    with pytest.raises(TrainingDivergedError) as info:
        gean.train(tiny_config(loss_kind="torque"), arm, dataset)
    assert info.value.epoch == 1
    assert info.value.batch == 0


def test_train_torque_loss_improves_on_easy_data(arm, dataset):
    model = gean.train(
        tiny_config(epochs=30, loss_kind="torque", hidden_width=16, learning_rate=1e-2),
        arm,
        dataset,
    )
    assert model.curve[:, 2].min() < model.curve[0, 2]


def test_single_member_ensemble_equals_train(arm, dataset):
    config = tiny_config(ensemble_size=1, loss_kind="torque")
    single = gean.train(config, arm, dataset)
    ensemble = gean.train_ensemble(config, arm, dataset)
    assert len(ensemble) == 1
    np.testing.assert_array_equal(
        ensemble.members[0].network.get_flat(), single.network.get_flat()
    )


def test_ensemble_members_use_consecutive_seeds(arm, dataset):
    ensemble = gean.train_ensemble(tiny_config(ensemble_size=3, epochs=1, seed=10), arm, dataset)
    assert [m.seed for m in ensemble.members] == [10, 11, 12]
    flats = [m.network.get_flat() for m in ensemble.members]
    assert not np.array_equal(flats[0], flats[1])
    assert not np.array_equal(flats[1], flats[2])


def test_ensemble_rejects_mismatched_members(arm, dataset, tiny_model):
    stats = features.compute_stats(arm, dataset.trajectories, 3, 1)
    other = gean.initialize_model(
        tiny_config(history_length=3), arm, stats, np.random.default_rng(0)
    )
    with pytest.raises(ModelMismatchError):
        gean.Ensemble(members=[tiny_model, other])


def test_disagreement(tiny_ensemble, tiny_model, trajectory):
    w = tiny_ensemble.window + 1
    q, u = trajectory.q[:w], trajectory.u[:w]
    single = gean.Ensemble(members=[tiny_model])
    np.testing.assert_array_equal(gean.disagreement(single, q, u), 0.0)

    pair = gean.Ensemble(members=tiny_ensemble.members[:2])
    a, b = (m.predict(q, u) for m in pair.members)
    np.testing.assert_allclose(gean.disagreement(pair, q, u), np.abs(a - b) / 2, rtol=1e-12)
    assert np.all(gean.disagreement(tiny_ensemble, q, u) >= 0)


def test_ensemble_mean_and_member_sampling(tiny_ensemble, trajectory):
    w = tiny_ensemble.window + 1
    q, u = trajectory.q[:w], trajectory.u[:w]
    members = [m.predict(q, u) for m in tiny_ensemble.members]
    np.testing.assert_allclose(tiny_ensemble.predict_mean(q, u), np.mean(members, axis=0))
    rng = np.random.default_rng(0)
    picked = {id(tiny_ensemble.sample_member(rng)) for _ in range(50)}
    assert picked == {id(m) for m in tiny_ensemble.members}


def test_model_round_trip(tmp_path, arm, dataset, trajectory):
    model = gean.train(tiny_config(epochs=1, loss_kind="torque"), arm, dataset)
    path = tmp_path / "model.gck"
    gean.save_model(model, path)
    loaded = gean.load_model(path)
    np.testing.assert_array_equal(loaded.network.get_flat(), model.network.get_flat())
    np.testing.assert_array_equal(loaded.stats.feature_mean, model.stats.feature_mean)
    np.testing.assert_array_equal(loaded.stats.torque_std, model.stats.torque_std)
    np.testing.assert_array_equal(loaded.curve, model.curve)
    assert (loaded.loss_kind, loaded.dt, loaded.n_joints) == ("torque", arm.dt, 2)
    w = model.window + 1
    np.testing.assert_array_equal(
        loaded.predict(trajectory.q[:w], trajectory.u[:w]),
        model.predict(trajectory.q[:w], trajectory.u[:w]),
    )


def test_ensemble_round_trip(tmp_path, tiny_ensemble):
    path = tmp_path / "ensemble.gck"
    gean.save_ensemble(tiny_ensemble, path)
    loaded = gean.load_ensemble(path)
    assert len(loaded) == 3
    for a, b in zip(tiny_ensemble.members, loaded.members):
        np.testing.assert_array_equal(a.network.get_flat(), b.network.get_flat())


def test_load_model_rejects_ensemble_file(tmp_path, tiny_ensemble):
    path = tmp_path / "ensemble.gck"
    gean.save_ensemble(tiny_ensemble, path)
    with pytest.raises(FormatVersionError):
        gean.load_model(path)


def test_corrupt_checkpoint_raises_parse_error(tmp_path, tiny_model):
    path = tmp_path / "model.gck"
    gean.save_model(tiny_model, path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[: len(lines) // 2]) + "\n")
    with pytest.raises(ParseError):
        gean.load_model(path)
