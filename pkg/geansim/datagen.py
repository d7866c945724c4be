# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Exploration data: spline controls, plant rollouts, finite-difference labels, splits, files."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from . import constants, dynamics, plant
from .container import Table, read_container, write_container
from .errors import EmptySplitError, InputRangeError, ParseError
from .features import compute_stats, finite_differences, trajectory_torque_labels
from .models import (
    ArmModel,
    Dataset,
    DatasetStats,
    EnvConfig,
    JointState,
    PlantModel,
    PlantState,
    Trajectory,
)
from .parallel import parallel_map, spawn_seeds
from .validation import schema_path

logger = logging.getLogger(__name__)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_bounds(bounds) -> np.ndarray:
    bounds = np.atleast_2d(np.asarray(bounds, dtype=np.float64))
    if bounds.ndim != 2 or bounds.shape[1] != 2:
        raise InputRangeError(f"bounds must be rows of [lo, hi], got shape {bounds.shape}")
    if np.any(bounds[:, 0] > bounds[:, 1]):
        raise InputRangeError(f"bounds have lo > hi: {bounds.tolist()}")
    return bounds


def knot_times(duration: float, knot_interval: float) -> np.ndarray:
    """0, knot_interval, ... up to duration; duration itself is always a knot."""
    count = int(np.floor(duration / knot_interval + 1e-9))
    times = knot_interval * np.arange(count + 1)
    if duration - times[-1] > 1e-9 * knot_interval:
        times = np.append(times, duration)
    return times


def sample_exploration_controls(
    seed,
    duration: float = constants.DEFAULT_TRAJ_DURATION,
    knot_interval: float = constants.DEFAULT_KNOT_INTERVAL,
    bounds=None,
    dt: float = constants.DEFAULT_DT,
    initial=None,
) -> np.ndarray:
    """Uniform random knots joined by a natural cubic spline, sampled every dt.

    Returns round(duration / dt) + 1 rows. When initial is given it replaces
    the first knot, so the sequence starts at the command the arm settled under.
    """
    if not knot_interval > 0 or not duration >= knot_interval:
        raise InputRangeError(
            f"need duration >= knot_interval > 0, got duration={duration!r}, "
            f"knot_interval={knot_interval!r}"
        )
    bounds = _check_bounds(constants.U_INIT_BOUNDS if bounds is None else bounds)
    rng = _rng(seed)
    times = knot_times(duration, knot_interval)
    knots = rng.uniform(bounds[:, 0], bounds[:, 1], size=(times.shape[0], bounds.shape[0]))
    if initial is not None:
        knots[0] = np.clip(initial, bounds[:, 0], bounds[:, 1])
    spline = CubicSpline(times, knots, axis=0, bc_type="natural")
    t = dt * np.arange(int(round(duration / dt)) + 1)
    return np.clip(spline(t), bounds[:, 0], bounds[:, 1])


def default_reset(arm: ArmModel) -> EnvConfig:
    """Reset protocol for an arm: the desk settings for four joints, a neutral one otherwise."""
    n = arm.n_joints
    if n == len(constants.RESET_POSE_DEG):
        return EnvConfig()
    neutral = np.tile([-0.5, 0.5], (n, 1))
    return EnvConfig(
        u_init_bounds=neutral,
        q_limits=arm.joint_limits,
        goal_bounds=np.zeros((n, 2)),
        reset_pose=np.zeros(n),
    )


def reset_controls(reset: EnvConfig, u_init: np.ndarray, dt: float) -> np.ndarray:
    """Commands applied before an episode: an optional linear ramp from 0, then u_init held."""
    hold = np.tile(u_init, (reset.settle_steps, 1))
    ramp_steps = int(round(reset.reset_ramp_seconds / dt))
    if ramp_steps == 0:
        return hold
    ramp = np.linspace(0.0, 1.0, ramp_steps + 1)[1:, None] * u_init[None, :]
    return np.vstack([ramp, hold])


def settle_plant(
    plant_model: PlantModel,
    arm: ArmModel,
    reset: EnvConfig,
    rng: np.random.Generator,
) -> Tuple[JointState, PlantState, np.ndarray]:
    """Sample u_init, start at the reset pose and let the plant settle under it."""
    bounds = reset.u_init_bounds
    u_init = rng.uniform(bounds[:, 0], bounds[:, 1])
    state = JointState.at_rest(reset.reset_pose)
    internal = PlantState.at_rest(plant_model)
    controls = reset_controls(reset, u_init, arm.dt)
    if controls.shape[0]:
        _, state, internal = plant.simulate(plant_model, arm, state, internal, controls, log=False)
    return state, internal, u_init


@dataclass
class _TrajectoryJob:
    plant: PlantModel
    arm: ArmModel
    reset: EnvConfig
    duration: float
    knot_interval: float
    control_bounds: np.ndarray
    noise_std: float
    seed: np.random.SeedSequence


def _collect_one(job: _TrajectoryJob) -> Trajectory:
    rng = np.random.default_rng(job.seed)
    state, internal, u_init = settle_plant(job.plant, job.arm, job.reset, rng)
    controls = sample_exploration_controls(
        rng,
        duration=job.duration,
        knot_interval=job.knot_interval,
        bounds=job.control_bounds,
        dt=job.arm.dt,
        initial=u_init,
    )
    traj = plant.plant_rollout(job.plant, job.arm, state, controls, internal=internal)
    if job.noise_std > 0:
        traj.q = traj.q + rng.normal(0.0, job.noise_std, size=traj.q.shape)
    return traj


def collect_dataset(
    plant_model: PlantModel,
    arm: ArmModel,
    n_traj: int,
    traj_duration: float = constants.DEFAULT_TRAJ_DURATION,
    seed: int = 0,
    knot_interval: float = constants.DEFAULT_KNOT_INTERVAL,
    control_bounds=None,
    reset: Optional[EnvConfig] = None,
    noise_std: float = 0.0,
    jobs: int = 1,
) -> Dataset:
    """Record n_traj open-loop exploration trajectories, each started by the reset protocol.

    Every trajectory draws from its own child of SeedSequence(seed), so the
    result is the same for any number of jobs.
    """
    if n_traj < 1:
        raise InputRangeError(f"n_traj must be >= 1, got {n_traj}")
    if noise_std < 0:
        raise InputRangeError(f"noise_std must be >= 0, got {noise_std}")
    reset = default_reset(arm) if reset is None else reset
    if reset.n_joints != arm.n_joints or plant_model.n_joints != arm.n_joints:
        raise InputRangeError(
            f"arm has {arm.n_joints} joints, plant {plant_model.n_joints}, "
            f"reset protocol {reset.n_joints}"
        )
    bounds = _check_bounds(reset.u_init_bounds if control_bounds is None else control_bounds)
    jobs_list = [
        _TrajectoryJob(
            plant=plant_model,
            arm=arm,
            reset=reset,
            duration=traj_duration,
            knot_interval=knot_interval,
            control_bounds=bounds,
            noise_std=noise_std,
            seed=child,
        )
        for child in spawn_seeds(seed, n_traj)
    ]
    logger.info("collecting %d trajectories of %.3g s (seed %d)", n_traj, traj_duration, seed)
    trajectories = parallel_map(_collect_one, jobs_list, jobs=jobs)
    return Dataset(arm=arm, trajectories=trajectories, noise_std=noise_std)


def finite_diff_labels(traj: Trajectory) -> Tuple[np.ndarray, np.ndarray]:
    """Backward-difference velocity and central-difference acceleration at samples 1 .. T-2."""
    return finite_differences(traj)


def torque_labels(arm: ArmModel, traj: Trajectory) -> np.ndarray:
    """Torques that make one simulator step from sample t land on logged sample t + 1."""
    return trajectory_torque_labels(arm, traj)


def resimulate(arm: ArmModel, traj: Trajectory, tau: np.ndarray) -> np.ndarray:
    """One simulator step from each interior sample under tau; returns predicted q_{t+1}."""
    qdot, _ = finite_diff_labels(traj)
    q_next, _ = dynamics.step_arrays(arm, traj.q[1:-1], qdot, tau)
    return q_next


def split_dataset(
    ds: Dataset,
    train_fraction: float = constants.DEFAULT_TRAIN_FRACTION,
    seed: int = 0,
    history_length: int = constants.DEFAULT_HISTORY_LENGTH,
    stride: int = constants.DEFAULT_HISTORY_STRIDE,
) -> Tuple[Dataset, Dataset]:
    """Random split at trajectory granularity; stats come from the train part and are shared."""
    if not 0 < train_fraction < 1:
        raise InputRangeError(f"train_fraction {train_fraction!r} out of range (0, 1)")
    n = len(ds)
    n_train = int(np.floor(train_fraction * n + 0.5))
    if n_train == 0 or n_train == n:
        raise EmptySplitError(
            f"{n} trajectories at train_fraction={train_fraction} leave an empty split"
        )
    order = np.random.default_rng(seed).permutation(n)
    train_idx = np.sort(order[:n_train])
    val_idx = np.sort(order[n_train:])
    train_trajs = [ds.trajectories[i] for i in train_idx]
    stats = compute_stats(ds.arm, train_trajs, history_length, stride)
    train = Dataset(arm=ds.arm, trajectories=train_trajs, stats=stats, noise_std=ds.noise_std)
    val = Dataset(
        arm=ds.arm,
        trajectories=[ds.trajectories[i] for i in val_idx],
        stats=stats,
        noise_std=ds.noise_std,
    )
    logger.debug("split %d trajectories into %d train / %d val", n, n_train, n - n_train)
    return train, val


def _arm_header(arm: ArmModel) -> dict:
    return {
        "name": arm.name,
        "link_length": arm.link_length.tolist(),
        "com_offset": arm.com_offset.tolist(),
        "mass": arm.mass.tolist(),
        "inertia_zz": arm.inertia_zz.tolist(),
        "gravity": arm.gravity,
        "dt": arm.dt,
        "joint_limits": arm.joint_limits.tolist(),
    }


def _arm_from_header(header: dict) -> ArmModel:
    return ArmModel(
        link_length=header["link_length"],
        com_offset=header["com_offset"],
        mass=header["mass"],
        inertia_zz=header["inertia_zz"],
        gravity=header["gravity"],
        dt=header["dt"],
        joint_limits=header["joint_limits"],
        name=header["name"],
    )


def stats_tables(stats: DatasetStats, prefix: str = "") -> List[Table]:
    return [
        Table(
            f"{prefix}feature_stats",
            ["mean", "std"],
            np.column_stack([stats.feature_mean, stats.feature_std]),
        ),
        Table(
            f"{prefix}torque_stats",
            ["mean", "std"],
            np.column_stack([stats.torque_mean, stats.torque_std]),
        ),
    ]


def stats_from_tables(
    path, tables: dict, history_length: int, stride: int, prefix: str = ""
) -> DatasetStats:
    try:
        features = tables[f"{prefix}feature_stats"].data
        torques = tables[f"{prefix}torque_stats"].data
    except KeyError as exc:
        raise ParseError(path, None, f"missing table {exc.args[0]!r}") from None
    return DatasetStats(
        history_length=history_length,
        stride=stride,
        feature_mean=features[:, 0].copy(),
        feature_std=features[:, 1].copy(),
        torque_mean=torques[:, 0].copy(),
        torque_std=torques[:, 1].copy(),
    )


def trajectory_columns(n_joints: int) -> List[str]:
    return (
        ["step", "t"]
        + [f"q{j}" for j in range(n_joints)]
        + [f"u{j}" for j in range(n_joints)]
    )


def save_dataset(ds: Dataset, path) -> None:
    """Write ds (trajectories, arm and stats) to a text container at full double precision."""
    n = ds.arm.n_joints
    header = {
        "n_joints": n,
        "dt": ds.arm.dt,
        "n_trajectories": len(ds),
        "noise_std": float(ds.noise_std),
        "arm": _arm_header(ds.arm),
    }
    tables = []
    if ds.stats is not None:
        header["stats"] = {
            "history_length": int(ds.stats.history_length),
            "stride": int(ds.stats.stride),
        }
        tables.extend(stats_tables(ds.stats))
    columns = trajectory_columns(n)
    for i, traj in enumerate(ds.trajectories):
        data = np.column_stack([np.arange(len(traj)), traj.t, traj.q, traj.u])
        tables.append(Table(f"traj{i}", columns, data, int_columns=1))
    write_container(path, constants.DATASET_KIND, constants.DATASET_FORMAT_VERSION, header, tables)


def load_dataset(path) -> Dataset:
    header, tables = read_container(
        path,
        constants.DATASET_KIND,
        constants.DATASET_FORMAT_VERSION,
        schema_path("dataset_header_schema.yaml"),
    )
    arm = _arm_from_header(header["arm"])
    n = header["n_joints"]
    if arm.n_joints != n:
        raise ParseError(path, None, f"header n_joints {n} does not match the arm ({arm.n_joints})")
    columns = trajectory_columns(n)
    trajectories = []
    for i in range(header["n_trajectories"]):
        table = tables.get(f"traj{i}")
        if table is None:
            raise ParseError(path, None, f"missing table 'traj{i}'")
        if list(table.columns) != columns:
            raise ParseError(path, None, f"traj{i} has columns {table.columns}, expected {columns}")
        data = table.data
        if not np.array_equal(data[:, 0], np.arange(data.shape[0])):
            raise ParseError(path, None, f"traj{i} step column is not 0, 1, 2, ...")
        trajectories.append(
            Trajectory(
                dt=header["dt"],
                t=data[:, 1].copy(),
                q=data[:, 2 : 2 + n].copy(),
                u=data[:, 2 + n :].copy(),
            )
        )
    stats = None
    if "stats" in header:
        stats = stats_from_tables(
            path, tables, header["stats"]["history_length"], header["stats"]["stride"]
        )
    return Dataset(arm=arm, trajectories=trajectories, stats=stats, noise_std=header["noise_std"])
