# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Long-running checks on the desk configuration (deselected unless run with -m slow)."""

from dataclasses import replace

import numpy as np
import pytest

from geansim import constants, datagen, evalharness, gean, reacher_env
from geansim.cli import main
from geansim.models import GeanConfig
from geansim.preset_loader import load_arm_preset, load_plant_preset

pytestmark = pytest.mark.slow

SEEDS = (0, 1, 2)
HORIZONS = (1, 500)


@pytest.fixture(scope="module")
def desk():
    return load_arm_preset("desk4"), load_plant_preset("default-messy")


@pytest.fixture(scope="module")
def desk_data(desk):
    arm, plant = desk
    train_set = datagen.collect_dataset(plant, arm, 300, seed=0, jobs=4)
    test_set = datagen.collect_dataset(plant, arm, 50, seed=constants.TEST_SEED_OFFSET, jobs=4)
    return train_set, test_set


def desk_config(**overrides):
    return replace(GeanConfig(epochs=30, history_length=3, history_stride=1), **overrides)


def median_mae(arm, models, test_set, horizon=500, provider="gean"):
    values = []
    for model in models:
        report = evalharness.replay_error(
            arm, model, test_set, HORIZONS, bootstrap_resamples=1000, start=max(model.window, 1)
        )
        values.append(report.mean(provider, horizon))
    return float(np.median(values)), report


@pytest.fixture(scope="module")
def loss_models(desk, desk_data):
    arm, _ = desk
    train_set, _ = desk_data
    return {
        kind: [
            gean.train(desk_config(loss_kind=kind, seed=seed), arm, train_set)
            for seed in SEEDS
        ]
        for kind in ("position", "torque")
    }


def test_labels_resimulate_held_out_trajectories(desk, desk_data):
    arm, _ = desk
    _, test_set = desk_data
    for traj in test_set.trajectories:
        tau = datagen.torque_labels(arm, traj)
        assert np.max(np.abs(datagen.resimulate(arm, traj, tau) - traj.q[2:])) < 1e-9


def test_position_model_beats_zero_torque_baseline(desk, desk_data, loss_models):
    arm, _ = desk
    _, test_set = desk_data
    model_mae, report = median_mae(arm, loss_models["position"], test_set)
    baseline = report.mean("zero-torque", 500)
    assert model_mae <= 0.2 * baseline


def test_position_loss_not_worse_than_torque_loss(desk, desk_data, loss_models):
    arm, _ = desk
    _, test_set = desk_data
    position, _ = median_mae(arm, loss_models["position"], test_set)
    torque, _ = median_mae(arm, loss_models["torque"], test_set)
    assert position <= torque


def test_errors_and_disagreement_fall_with_more_data(desk, desk_data):
    arm, plant = desk
    _, test_set = desk_data
    table = evalharness.ablate_dataset_size(
        constants.ABLATION_DATASET_SIZES,
        constants.ABLATION_SEEDS,
        desk_config(loss_kind="position"),
        plant,
        arm,
        test_set=test_set,
        horizons=HORIZONS,
        bootstrap_resamples=1000,
        jobs=4,
    )
    errors, spreads = [], []
    for size in constants.ABLATION_DATASET_SIZES:
        rows = [r for r in table.select("gean", 500) if r["dataset_size"] == size]
        errors.append(np.median([r["mean_deg"] for r in rows]))
        spreads.append(np.mean([r["mean_disagreement"] for r in rows]))
    assert errors[0] > errors[1] > errors[2]
    assert spreads[0] > spreads[1] > spreads[2]


def test_history_ablation_direction(desk, desk_data):
    arm, _ = desk
    train_set, test_set = desk_data
    table = evalharness.ablate_history(
        (1, 3),
        (1, 4),
        desk_config(loss_kind="position"),
        train_set,
        arm,
        test_set,
        seeds=SEEDS,
        horizons=HORIZONS,
        bootstrap_resamples=1000,
    )

    def median(horizon, **cell):
        return np.median([r["mean_deg"] for r in table.select("gean", horizon, **cell)])

    assert median(500, history_length=3, history_stride=1) < median(
        500, history_length=1, history_stride=1
    )
    assert median(1, history_length=3, history_stride=4) >= median(
        1, history_length=3, history_stride=1
    )


def test_multistep_reduction_is_bit_identical_on_desk_data(desk, desk_data):
    arm, _ = desk
    train_set, _ = desk_data
    small = replace(train_set, trajectories=train_set.trajectories[:40])
    config = desk_config(epochs=3, hidden_width=64)
    position = gean.train(replace(config, loss_kind="position"), arm, small)
    multistep = gean.train(
        replace(config, loss_kind="multistep", rollout_length=1),
        arm,
        small,
        c_table=np.ones((1, arm.n_joints)),
    )
    np.testing.assert_array_equal(position.curve, multistep.curve)
    np.testing.assert_array_equal(position.network.get_flat(), multistep.network.get_flat())


def test_environment_contracts_over_random_episodes(desk, desk_data):
    arm, _ = desk
    train_set, _ = desk_data
    config = desk_config(epochs=1, hidden_width=16, ensemble_size=3)
    ensemble = gean.train_ensemble(
        config, arm, replace(train_set, trajectories=train_set.trajectories[:20])
    )
    env = reacher_env.ReacherEnv(arm, ensemble)
    weights = env.config
    for episode in range(1000):
        env.reset(seed=episode)
        rng = np.random.default_rng(episode)
        transitions = 0
        truncated = False
        while not truncated:
            u_before = env.state.u.copy()
            _, reward, _, truncated, info = env.step(reacher_env.random_controller(env, rng))
            assert np.all(np.abs(env.state.u - u_before) <= 0.01 + 1e-15)
            weighted = (
                info["r_dist"]
                + weights.c_act * info["r_act"]
                + weights.c_disag * info["r_disag"]
                + weights.c_lim * info["r_lim"]
            )
            assert abs(reward - weighted) <= 1e-12
            transitions += 1
        assert transitions == 200


def test_shooting_beats_random_on_easy_plant(desk):
    arm, _ = desk
    easy = load_plant_preset("easy")
    train_set = datagen.collect_dataset(easy, arm, 100, seed=0, jobs=4)
    ensemble = gean.train_ensemble(desk_config(ensemble_size=3), arm, train_set)
    env = reacher_env.ReacherEnv(arm, ensemble)
    errors = {}
    for name, controller in (
        ("shooting", reacher_env.make_shooting(ensemble)),
        ("random", reacher_env.random_controller),
    ):
        errors[name] = np.median(
            [reacher_env.run_episode(env, controller, seed).final_error_deg for seed in range(20)]
        )
    assert errors["shooting"] < errors["random"]


PIPELINE_CONFIG = """
data:
  n_traj: 20
  n_test_traj: 5
gean:
  hidden_width: 32
  epochs: 3
  ensemble_size: 2
eval:
  bootstrap_resamples: 500
io:
  out_dir: {out}
"""


def run_pipeline(tmp_path, name):
    config = tmp_path / f"{name}.yml"
    out = tmp_path / name
    config.write_text(PIPELINE_CONFIG.format(out=out))
    for argv in (
        ["gen-data", str(config)],
        ["gen-data", str(config), "--test"],
        ["train", str(config), "--data", str(out / "dataset.gsd")],
        [
            "eval",
            str(config),
            "--ensemble",
            str(out / "gean-position.gck"),
            "--test-data",
            str(out / "test.gsd"),
        ],
    ):
        assert main(argv + ["-q"]) == 0
    return out


def test_pipeline_is_deterministic(tmp_path):
    first = run_pipeline(tmp_path, "first")
    second = run_pipeline(tmp_path, "second")
    for name in ("replay.csv", "gean-position.curve.csv", "dataset.gsd", "test.gsd"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
