# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Synthetic muscle-actuated plant that stands in for the physical robot.

Each joint is driven by an antagonistic pair whose desired pressures move
oppositely with a single command u in [-1, 1]. The agonist command passes a
play (dead-band) operator, both pressures follow a first-order lag, and the
joint torque is

    tau = force_gain * (p_ag - p_ant) * shape(q) - friction(q, qdot)

Every pathology (lag, hysteresis, friction, angle-dependent friction) is a
separate parameter so it can be switched off on its own.
"""

from typing import Optional, Tuple

import numpy as np

from . import constants, dynamics
from .errors import InputRangeError, RolloutDivergedError, ShapeError
from .models import ArmModel, JointState, PlantModel, PlantState, Trajectory


def contraction_shape(plant: PlantModel, q: np.ndarray) -> np.ndarray:
    """Configuration-dependent torque shaping, clipped to [SHAPE_FLOOR, 1]."""
    a = plant.contraction_nonlinearity
    raw = 1.0 + a[:, 0] * q + a[:, 1] * q**2 + a[:, 2] * q**3
    return np.clip(raw, constants.SHAPE_FLOOR, 1.0)


def friction_torque(plant: PlantModel, q: np.ndarray, qdot: np.ndarray) -> np.ndarray:
    """Smoothed Coulomb friction scaled by tendon routing, plus viscous friction."""
    coulomb = plant.coulomb_friction * (1.0 + plant.friction_angle_gain * np.abs(q))
    return coulomb * np.tanh(qdot / constants.FRICTION_VELOCITY_SCALE) + (
        plant.viscous_friction * qdot
    )


def desired_pressures(plant: PlantModel, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    half = plant.max_pressure / 2.0
    return half * (1.0 + u), half * (1.0 - u)


def static_torque(plant: PlantModel, q: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Torque once pressures have settled, without friction or hysteresis."""
    p_ag, p_ant = desired_pressures(plant, np.asarray(u, dtype=np.float64))
    return plant.force_gain * (p_ag - p_ant) * contraction_shape(plant, q)


def _check_controls(plant: PlantModel, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    if u.shape[-1:] != (plant.n_joints,):
        raise ShapeError(f"u has shape {u.shape}, expected last dimension {plant.n_joints}")
    if not np.all(np.isfinite(u)) or np.any(np.abs(u) > 1.0):
        bad = u[~(np.abs(u) <= 1.0)]
        raise InputRangeError(f"control values {bad[:4].tolist()} out of range [-1, 1]")
    return u


def _actuate(
    plant: PlantModel,
    q: np.ndarray,
    qdot: np.ndarray,
    internal: PlantState,
    u: np.ndarray,
    dt: float,
) -> Tuple[np.ndarray, PlantState]:
    target_ag, _ = desired_pressures(plant, u)
    half_width = plant.hysteresis_width / 2.0
    # Play operator: the anchor moves only when the command leaves the dead-band.
    anchor = np.clip(internal.hysteresis_anchor, target_ag - half_width, target_ag + half_width)
    anchor = np.clip(anchor, 0.0, plant.max_pressure)
    # Exact discretization of the first-order lag over one step.
    blend = -np.expm1(-dt / plant.pressure_time_constant)
    p_ag = internal.agonist_pressure + blend * (anchor - internal.agonist_pressure)
    p_ant = internal.antagonist_pressure + blend * (
        (plant.max_pressure - anchor) - internal.antagonist_pressure
    )
    p_ag = np.clip(p_ag, 0.0, plant.max_pressure)
    p_ant = np.clip(p_ant, 0.0, plant.max_pressure)
    tau = plant.force_gain * (p_ag - p_ant) * contraction_shape(plant, q)
    tau = tau - friction_torque(plant, q, qdot)
    return tau, PlantState(
        agonist_pressure=p_ag, antagonist_pressure=p_ant, hysteresis_anchor=anchor
    )


def plant_torque(
    plant: PlantModel,
    joint_state: JointState,
    internal: PlantState,
    u,
    dt: float = constants.DEFAULT_DT,
) -> Tuple[np.ndarray, PlantState]:
    """Advance the actuator state by one step of length dt under u; return (tau, internal')."""
    u = _check_controls(plant, u)
    if u.ndim != 1:
        raise ShapeError(f"u has shape {u.shape}, expected ({plant.n_joints},)")
    return _actuate(plant, joint_state.q, joint_state.qdot, internal, u, dt)


def simulate(
    plant: PlantModel,
    arm: ArmModel,
    state: JointState,
    internal: PlantState,
    controls: np.ndarray,
    log: bool = True,
) -> Tuple[Optional[np.ndarray], JointState, PlantState]:
    """Apply each control for one step.

    Returns (positions after each step, final joint state, final plant state).
    """
    controls = _check_controls(plant, np.atleast_2d(controls))
    if arm.n_joints != plant.n_joints:
        raise ShapeError(
            f"arm has {arm.n_joints} joints but plant has {plant.n_joints}"
        )
    q, qdot = state.q.copy(), state.qdot.copy()
    positions = np.empty((controls.shape[0], arm.n_joints)) if log else None
    for k, u in enumerate(controls):
        tau, internal = _actuate(plant, q, qdot, internal, u, arm.dt)
        q, qdot = dynamics.step_arrays(arm, q, qdot, tau)
        q, qdot = dynamics.enforce_joint_limits(arm, q, qdot)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(qdot))):
            raise RolloutDivergedError(k + 1)
        if log:
            positions[k] = q
    return positions, JointState(q=q, qdot=qdot), internal


def plant_rollout(
    plant: PlantModel,
    arm: ArmModel,
    init: JointState,
    controls,
    internal: Optional[PlantState] = None,
) -> Trajectory:
    """Roll the plant forward under a control sequence sampled at arm.dt.

    K controls yield K samples: sample k holds q_k and the command u_k applied
    from k to k + 1, so a single control gives only the initial sample.
    """
    controls = _check_controls(plant, np.atleast_2d(controls))
    if controls.shape[0] < 1:
        raise InputRangeError("control sequence must contain at least one sample")
    if internal is None:
        internal = PlantState.at_rest(plant)
    positions, _, _ = simulate(plant, arm, init, internal.copy(), controls[:-1])
    q = np.vstack([init.q[None, :], positions])
    t = arm.dt * np.arange(controls.shape[0])
    return Trajectory(dt=arm.dt, t=t, q=q, u=controls.copy())
