# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Small arms, plants, datasets and networks shared by the tests."""

import numpy as np
import pytest

from geansim import datagen, features, gean
from geansim.models import ArmModel, Dataset, EnvConfig, GeanConfig, PlantModel, Trajectory
from geansim.network import Mlp


def make_two_link(dt=0.002, gravity=9.81, limits=None):
    return ArmModel(
        link_length=[0.3, 0.25],
        com_offset=[0.15, 0.12],
        mass=[0.6, 0.4],
        inertia_zz=[0.0045, 0.002],
        gravity=gravity,
        dt=dt,
        joint_limits=limits,
        name="two-link",
    )


def make_plant(n=2, messy=True):
    zeros = np.zeros(n)
    return PlantModel(
        pressure_time_constant=np.full(n, 0.05 if messy else 1e-9),
        max_pressure=np.ones(n),
        force_gain=np.linspace(4.0, 2.0, n),
        contraction_nonlinearity=np.tile([0.0, -0.3 if messy else 0.0, 0.0], (n, 1)),
        coulomb_friction=np.full(n, 0.1) if messy else zeros,
        viscous_friction=np.full(n, 0.2) if messy else zeros,
        friction_angle_gain=np.full(n, 0.5) if messy else zeros,
        hysteresis_width=np.full(n, 0.05) if messy else zeros,
        name="test-plant",
    )


def two_link_reset(arm):
    return EnvConfig(
        u_init_bounds=[[-0.3, 0.3], [-0.3, 0.3]],
        q_limits=arm.joint_limits,
        goal_bounds=np.deg2rad([[-20.0, 20.0], [-20.0, 20.0]]),
        reset_pose=[0.0, 0.0],
        settle_steps=50,
    )


def tiny_config(**overrides):
    values = dict(
        history_length=2,
        history_stride=1,
        hidden_layers=1,
        hidden_width=8,
        epochs=2,
        batch_size=64,
        ensemble_size=2,
        train_fraction=0.75,
        learning_rate=1e-3,
        seed=0,
    )
    values.update(overrides)
    return GeanConfig(**values)


@pytest.fixture
def arm():
    return make_two_link()


@pytest.fixture
def plant():
    return make_plant()


@pytest.fixture
def reset(arm):
    return two_link_reset(arm)


@pytest.fixture
def dataset(arm, plant, reset):
    """Eight short exploration trajectories (0.2 s each)."""
    return datagen.collect_dataset(
        plant, arm, 8, traj_duration=0.2, seed=3, knot_interval=0.05, reset=reset
    )


@pytest.fixture
def trajectory(dataset):
    return dataset.trajectories[0]


@pytest.fixture
def tiny_model(arm, dataset):
    """Untrained tanh network with stats from the fixture dataset."""
    config = tiny_config()
    stats = features.compute_stats(
        arm, dataset.trajectories, config.history_length, config.history_stride
    )
    return gean.initialize_model(config, arm, stats, np.random.default_rng(1))


@pytest.fixture
def tiny_ensemble(arm, dataset):
    config = tiny_config()
    stats = features.compute_stats(
        arm, dataset.trajectories, config.history_length, config.history_stride
    )
    members = [
        gean.initialize_model(config, arm, stats, np.random.default_rng(seed))
        for seed in range(3)
    ]
    return gean.Ensemble(members=members)


def constant_trajectory(n=2, length=20, dt=0.002, value=0.1):
    q = np.full((length, n), value)
    return Trajectory(dt=dt, t=dt * np.arange(length), q=q, u=np.zeros((length, n)))


def small_mlp(sizes=(4, 5, 3), seed=0):
    return Mlp.initialize(list(sizes), np.random.default_rng(seed))


def as_dataset(arm, trajectories):
    return Dataset(arm=arm, trajectories=list(trajectories))
