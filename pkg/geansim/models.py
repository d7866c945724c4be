# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Data structures for arms, plants, trajectories and configs (no file I/O)."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np

from . import constants
from .errors import InputRangeError, ShapeError


def _as_vector(name: str, value, n: Optional[int] = None) -> np.ndarray:
    """Return value as a read-only float64 vector, checking its length."""
    arr = np.array(value, dtype=np.float64).reshape(-1)
    if n is not None and arr.shape[0] != n:
        raise ShapeError(f"{name} has {arr.shape[0]} entries, expected {n}")
    arr.setflags(write=False)
    return arr


def _as_bounds(name: str, value, n: int) -> np.ndarray:
    """Return value as a read-only (n, 2) array of [lo, hi] rows with lo <= hi."""
    arr = np.array(value, dtype=np.float64)
    if arr.shape != (n, 2):
        raise ShapeError(f"{name} has shape {arr.shape}, expected ({n}, 2)")
    if np.any(arr[:, 0] > arr[:, 1]):
        raise InputRangeError(f"{name} has lo > hi: {arr.tolist()}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ArmModel:
    """Planar serial chain with revolute joints, angles relative to the parent link.

    Angles are measured from the hanging rest pose; gravity acts in the plane
    of motion. Joint friction is zero: every actuation effect lives in the plant.
    """

    link_length: np.ndarray
    com_offset: np.ndarray
    mass: np.ndarray
    inertia_zz: np.ndarray
    gravity: float = constants.DEFAULT_GRAVITY
    dt: float = constants.DEFAULT_DT
    joint_limits: Optional[np.ndarray] = None
    name: str = "arm"

    def __post_init__(self):
        n = np.size(self.link_length)
        if n < 1:
            raise InputRangeError("an arm needs at least one joint")
        object.__setattr__(self, "link_length", _as_vector("link_length", self.link_length, n))
        object.__setattr__(self, "com_offset", _as_vector("com_offset", self.com_offset, n))
        object.__setattr__(self, "mass", _as_vector("mass", self.mass, n))
        object.__setattr__(self, "inertia_zz", _as_vector("inertia_zz", self.inertia_zz, n))
        if self.joint_limits is None:
            limits = np.tile([-np.pi, np.pi], (n, 1))
        else:
            limits = self.joint_limits
        object.__setattr__(self, "joint_limits", _as_bounds("joint_limits", limits, n))
        object.__setattr__(self, "gravity", float(self.gravity))
        object.__setattr__(self, "dt", float(self.dt))
        if np.any(self.mass <= 0):
            raise InputRangeError(f"masses must be > 0, got {self.mass.tolist()}")
        if np.any(self.link_length <= 0):
            raise InputRangeError(
                f"link lengths must be > 0, got {self.link_length.tolist()}"
            )
        if np.any(self.inertia_zz < 0):
            raise InputRangeError(
                f"inertia_zz must be >= 0, got {self.inertia_zz.tolist()}"
            )
        if not self.dt > 0:
            raise InputRangeError(f"dt must be > 0, got {self.dt!r}")

    @property
    def n_joints(self) -> int:
        return int(self.link_length.shape[0])

    @cached_property
    def lever_arms(self) -> np.ndarray:
        """Row i holds the distances from each joint k <= i to the COM of link i."""
        n = self.n_joints
        levers = np.zeros((n, n))
        for i in range(n):
            levers[i, :i] = self.link_length[:i]
            levers[i, i] = self.com_offset[i]
        levers.setflags(write=False)
        return levers

    @cached_property
    def coupling(self) -> np.ndarray:
        """Symmetric D with M_abs[a, b] = D[a, b] * cos(theta_a - theta_b) (+ inertia)."""
        d = np.einsum("i,ia,ib->ab", self.mass, self.lever_arms, self.lever_arms)
        d.setflags(write=False)
        return d

    @cached_property
    def gravity_moments(self) -> np.ndarray:
        """G[k] = sum_i m_i * lever_arms[i, k]; gravity torque on absolute angle k is g*G[k]*sin."""
        g = self.mass @ self.lever_arms
        g.setflags(write=False)
        return g


@dataclass
class JointState:
    """Joint positions (rad) and velocities (rad/s)."""

    q: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        self.q = np.array(self.q, dtype=np.float64)
        self.qdot = np.array(self.qdot, dtype=np.float64)
        if self.q.shape != self.qdot.shape:
            raise ShapeError(
                f"q has shape {self.q.shape} but qdot has shape {self.qdot.shape}"
            )

    @classmethod
    def at_rest(cls, q) -> "JointState":
        q = np.array(q, dtype=np.float64)
        return cls(q=q, qdot=np.zeros_like(q))


@dataclass(frozen=True, eq=False)
class PlantModel:
    """Antagonistic muscle-pair actuation, one pair per joint.

    contraction_nonlinearity has one row (a1, a2, a3) per joint; the torque is
    shaped by clip(1 + a1*q + a2*q^2 + a3*q^3, SHAPE_FLOOR, 1).
    """

    pressure_time_constant: np.ndarray
    max_pressure: np.ndarray
    force_gain: np.ndarray
    contraction_nonlinearity: np.ndarray
    coulomb_friction: np.ndarray
    viscous_friction: np.ndarray
    friction_angle_gain: np.ndarray
    hysteresis_width: np.ndarray
    name: str = "plant"

    def __post_init__(self):
        n = np.size(self.force_gain)
        for attr in (
            "pressure_time_constant",
            "max_pressure",
            "force_gain",
            "coulomb_friction",
            "viscous_friction",
            "friction_angle_gain",
            "hysteresis_width",
        ):
            object.__setattr__(self, attr, _as_vector(attr, getattr(self, attr), n))
        shaping = np.array(self.contraction_nonlinearity, dtype=np.float64)
        if shaping.shape != (n, 3):
            raise ShapeError(
                f"contraction_nonlinearity has shape {shaping.shape}, expected ({n}, 3)"
            )
        shaping.setflags(write=False)
        object.__setattr__(self, "contraction_nonlinearity", shaping)
        if np.any(self.pressure_time_constant <= 0):
            raise InputRangeError("pressure_time_constant must be > 0")
        if np.any(self.max_pressure <= 0) or np.any(self.max_pressure > 1):
            raise InputRangeError("max_pressure must lie in (0, 1]")
        for attr in (
            "coulomb_friction",
            "viscous_friction",
            "friction_angle_gain",
            "hysteresis_width",
        ):
            if np.any(getattr(self, attr) < 0):
                raise InputRangeError(f"{attr} must be >= 0")

    @property
    def n_joints(self) -> int:
        return int(self.force_gain.shape[0])


@dataclass
class PlantState:
    """Hidden actuator state: muscle pressures and the hysteresis dead-band anchor."""

    agonist_pressure: np.ndarray
    antagonist_pressure: np.ndarray
    hysteresis_anchor: np.ndarray

    @classmethod
    def at_rest(cls, plant: PlantModel) -> "PlantState":
        """Symmetric rest: both muscles at half the maximum pressure (u = 0)."""
        half = np.array(plant.max_pressure) / 2.0
        return cls(
            agonist_pressure=half.copy(),
            antagonist_pressure=half.copy(),
            hysteresis_anchor=half.copy(),
        )

    def copy(self) -> "PlantState":
        return PlantState(
            agonist_pressure=self.agonist_pressure.copy(),
            antagonist_pressure=self.antagonist_pressure.copy(),
            hysteresis_anchor=self.hysteresis_anchor.copy(),
        )


@dataclass
class Trajectory:
    """Logged samples at simulator rate: times t (T,), positions q (T, n), controls u (T, n).

    u[k] is the command applied from sample k to sample k + 1.
    """

    dt: float
    t: np.ndarray
    q: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.float64)
        self.q = np.asarray(self.q, dtype=np.float64)
        self.u = np.asarray(self.u, dtype=np.float64)
        if self.q.ndim != 2 or self.u.shape != self.q.shape:
            raise ShapeError(
                f"q and u must be (T, n) with equal shapes, got {self.q.shape} and {self.u.shape}"
            )
        if self.t.shape != (self.q.shape[0],):
            raise ShapeError(
                f"t has shape {self.t.shape}, expected ({self.q.shape[0]},)"
            )
        if self.t.shape[0] > 1:
            spacing = np.diff(self.t)
            if np.any(spacing <= 0) or not np.allclose(spacing, self.dt, rtol=1e-9, atol=1e-12):
                raise InputRangeError("timestamps must increase with spacing dt")

    def __len__(self) -> int:
        return int(self.q.shape[0])

    @property
    def n_joints(self) -> int:
        return int(self.q.shape[1])


@dataclass
class DatasetStats:
    """Input normalizer (delta-history features) and torque standardizer, from training data."""

    history_length: int
    stride: int
    feature_mean: np.ndarray
    feature_std: np.ndarray
    torque_mean: np.ndarray
    torque_std: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.torque_std) <= 0):
            raise InputRangeError("torque_std components must be > 0")


@dataclass
class Dataset:
    """Exploration trajectories plus the arm they were recorded on and the training stats."""

    arm: ArmModel
    trajectories: List[Trajectory]
    stats: Optional[DatasetStats] = None
    noise_std: float = 0.0

    def __len__(self) -> int:
        return len(self.trajectories)

    @property
    def n_samples(self) -> int:
        return sum(len(traj) for traj in self.trajectories)


@dataclass
class GeanConfig:
    """Hyperparameters of a GeAN and its training run."""

    history_length: int = constants.DEFAULT_HISTORY_LENGTH
    history_stride: int = constants.DEFAULT_HISTORY_STRIDE
    hidden_layers: int = constants.DEFAULT_HIDDEN_LAYERS
    hidden_width: int = constants.DEFAULT_HIDDEN_WIDTH
    activation: str = "tanh"
    learning_rate: float = constants.DEFAULT_LEARNING_RATE
    adam_betas: Tuple[float, float] = constants.ADAM_BETAS
    adam_eps: float = constants.ADAM_EPS
    epochs: int = constants.DEFAULT_EPOCHS
    batch_size: int = constants.DEFAULT_BATCH_SIZE
    loss_kind: str = "position"
    rollout_length: int = 1
    ensemble_size: int = constants.DEFAULT_ENSEMBLE_SIZE
    train_fraction: float = constants.DEFAULT_TRAIN_FRACTION
    seed: int = 0

    def __post_init__(self):
        self.adam_betas = tuple(self.adam_betas)
        if self.history_length < 1:
            raise InputRangeError(f"history_length must be >= 1, got {self.history_length}")
        if self.history_stride < 1:
            raise InputRangeError(f"history_stride must be >= 1, got {self.history_stride}")
        if self.hidden_layers < 0 or self.hidden_width < 1:
            raise InputRangeError("hidden_layers must be >= 0 and hidden_width >= 1")
        if self.activation != "tanh":
            raise InputRangeError(f"unsupported activation {self.activation!r}")
        if not self.learning_rate > 0:
            raise InputRangeError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 0 or self.batch_size < 1:
            raise InputRangeError("epochs must be >= 0 and batch_size >= 1")
        if self.loss_kind not in constants.LOSS_KINDS:
            raise InputRangeError(
                f"loss_kind {self.loss_kind!r} not in {constants.LOSS_KINDS}"
            )
        if self.rollout_length < 1:
            raise InputRangeError(f"rollout_length must be >= 1, got {self.rollout_length}")
        if self.ensemble_size < 1:
            raise InputRangeError(f"ensemble_size must be >= 1, got {self.ensemble_size}")
        if not 0 < self.train_fraction < 1:
            raise InputRangeError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")

    @property
    def window(self) -> int:
        """Number of past samples the history reaches back (H * s)."""
        return self.history_length * self.history_stride

    @property
    def steps_ahead(self) -> int:
        """Simulator steps per training window for the configured loss."""
        return self.rollout_length if self.loss_kind == "multistep" else 1


def _deg_bounds(bounds) -> np.ndarray:
    return np.deg2rad(np.array(bounds, dtype=np.float64))


@dataclass
class EnvConfig:
    """Reacher environment settings; angles are stored in radians."""

    episode_seconds: float = constants.EPISODE_SECONDS
    action_repeat: int = constants.ACTION_REPEAT
    delta_u_max: float = constants.DELTA_U_MAX
    u_init_bounds: np.ndarray = field(
        default_factory=lambda: np.array(constants.U_INIT_BOUNDS)
    )
    q_limits: np.ndarray = field(default_factory=lambda: _deg_bounds(constants.Q_LIMITS_DEG))
    goal_bounds: np.ndarray = field(
        default_factory=lambda: _deg_bounds(constants.GOAL_BOUNDS_DEG)
    )
    reset_pose: np.ndarray = field(
        default_factory=lambda: np.deg2rad(np.array(constants.RESET_POSE_DEG))
    )
    settle_steps: int = constants.SETTLE_STEPS
    reset_ramp_seconds: float = 0.0
    c_act: float = constants.C_ACT
    c_disag: float = constants.C_DISAG
    c_lim: float = constants.C_LIM
    limit_margin: float = float(np.deg2rad(constants.LIMIT_MARGIN_DEG))
    command_range: Tuple[float, float] = constants.COMMAND_RANGE

    def __post_init__(self):
        n = np.size(self.reset_pose)
        self.reset_pose = _as_vector("reset_pose", self.reset_pose, n)
        self.u_init_bounds = _as_bounds("u_init_bounds", self.u_init_bounds, n)
        self.q_limits = _as_bounds("q_limits", self.q_limits, n)
        self.goal_bounds = _as_bounds("goal_bounds", self.goal_bounds, n)
        self.command_range = tuple(self.command_range)
        if self.command_range[0] > self.command_range[1]:
            raise InputRangeError(f"command_range lo > hi: {self.command_range}")
        if self.action_repeat < 1:
            raise InputRangeError(f"action_repeat must be >= 1, got {self.action_repeat}")
        for name in ("c_act", "c_disag", "c_lim", "delta_u_max", "limit_margin"):
            if getattr(self, name) < 0:
                raise InputRangeError(f"{name} must be >= 0")
        if self.settle_steps < 0 or self.reset_ramp_seconds < 0:
            raise InputRangeError("settle_steps and reset_ramp_seconds must be >= 0")

    @property
    def n_joints(self) -> int:
        return int(self.reset_pose.shape[0])

    def agent_steps(self, dt: float) -> int:
        """Agent steps per episode (2 s at 100 Hz over a 500 Hz simulator gives 200)."""
        return int(round(self.episode_seconds / (dt * self.action_repeat)))
