# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Rigid-body dynamics of a planar serial arm and the symplectic Euler stepper.

Terms are assembled in absolute link angles theta = S q (S lower-triangular
ones), where the planar Lagrangian has a closed form:

    M_abs[a, b] = D[a, b] cos(theta_a - theta_b) + delta_ab I_a
    c_abs[a]    = sum_b D[a, b] sin(theta_a - theta_b) omega_b^2
    g_abs[k]    = g G[k] sin(theta_k)

and mapped to joint space with M = S^T M_abs S, c + g = S^T (c_abs + g_abs).
All functions accept arbitrary leading batch dimensions.
"""

from functools import lru_cache
from typing import Tuple

import numpy as np

from .errors import NumericalError, ShapeError
from .models import ArmModel, JointState


@lru_cache(maxsize=16)
def _chain(n: int) -> np.ndarray:
    chain = np.tril(np.ones((n, n)))
    chain.setflags(write=False)
    return chain


def _check(model: ArmModel, **arrays) -> Tuple[np.ndarray, ...]:
    out = []
    shape = None
    for name, value in arrays.items():
        arr = np.asarray(value, dtype=np.float64)
        if arr.ndim == 0 or arr.shape[-1] != model.n_joints:
            raise ShapeError(
                f"{name} has shape {arr.shape}, expected last dimension {model.n_joints}"
            )
        if shape is not None and arr.shape != shape:
            raise ShapeError(f"{name} has shape {arr.shape}, expected {shape}")
        shape = arr.shape
        out.append(arr)
    return tuple(out)


def _to_joint_space(x: np.ndarray) -> np.ndarray:
    """S^T x: reverse cumulative sum over joints."""
    return np.flip(np.cumsum(np.flip(x, -1), axis=-1), -1)


def _from_joint_space(x: np.ndarray) -> np.ndarray:
    """S^-T x: x_a - x_{a+1}."""
    out = np.array(x, copy=True)
    out[..., :-1] -= x[..., 1:]
    return out


def _differences(x: np.ndarray) -> np.ndarray:
    """S^-1 x: relative angles from absolute ones."""
    return np.diff(x, axis=-1, prepend=0.0)


def _angle_terms(model: ArmModel, theta: np.ndarray):
    rel = theta[..., :, None] - theta[..., None, :]
    cos_part = model.coupling * np.cos(rel)
    sin_part = model.coupling * np.sin(rel)
    return cos_part, sin_part


def _absolute_mass_matrix(model: ArmModel, cos_part: np.ndarray) -> np.ndarray:
    return cos_part + np.diag(model.inertia_zz)


def _spd_solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve matrix @ x = rhs through a Cholesky factorization (batched)."""
    try:
        chol = np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"mass matrix is not positive definite: {exc}") from exc
    y = np.linalg.solve(chol, rhs[..., None])
    return np.linalg.solve(np.swapaxes(chol, -1, -2), y)[..., 0]


def mass_matrix(model: ArmModel, q) -> np.ndarray:
    """Return M(q), symmetric positive definite, shape (..., n, n)."""
    (q,) = _check(model, q=q)
    theta = np.cumsum(q, axis=-1)
    cos_part, _ = _angle_terms(model, theta)
    chain = _chain(model.n_joints)
    m = chain.T @ _absolute_mass_matrix(model, cos_part) @ chain
    return 0.5 * (m + np.swapaxes(m, -1, -2))


def gravity(model: ArmModel, q) -> np.ndarray:
    """Return g(q), the joint torque that holds the arm still against gravity."""
    (q,) = _check(model, q=q)
    theta = np.cumsum(q, axis=-1)
    return _to_joint_space(model.gravity * model.gravity_moments * np.sin(theta))


def coriolis_gravity(model: ArmModel, q, qdot, include_gravity: bool = True) -> np.ndarray:
    """Return c(q, qdot) + g(q); with include_gravity=False only c(q, qdot)."""
    q, qdot = _check(model, q=q, qdot=qdot)
    theta = np.cumsum(q, axis=-1)
    omega = np.cumsum(qdot, axis=-1)
    _, sin_part = _angle_terms(model, theta)
    bias = np.einsum("...ab,...b->...a", sin_part, omega * omega)
    if include_gravity:
        bias = bias + model.gravity * model.gravity_moments * np.sin(theta)
    return _to_joint_space(bias)


def inverse_dynamics(model: ArmModel, q, qdot, qddot) -> np.ndarray:
    """tau = M(q) qddot + c(q, qdot) + g(q)."""
    q, qdot, qddot = _check(model, q=q, qdot=qdot, qddot=qddot)
    m = mass_matrix(model, q)
    return np.einsum("...ab,...b->...a", m, qddot) + coriolis_gravity(model, q, qdot)


def forward_dynamics(model: ArmModel, q, qdot, tau) -> np.ndarray:
    """Solve M(q) qddot = tau - c(q, qdot) - g(q) for qddot."""
    q, qdot, tau = _check(model, q=q, qdot=qdot, tau=tau)
    rhs = tau - coriolis_gravity(model, q, qdot)
    return _spd_solve(mass_matrix(model, q), rhs)


def step_arrays(model: ArmModel, q, qdot, tau) -> Tuple[np.ndarray, np.ndarray]:
    """One symplectic Euler step on raw arrays: velocity first, then position."""
    qddot = forward_dynamics(model, q, qdot, tau)
    qdot_next = qdot + model.dt * qddot
    q_next = q + model.dt * qdot_next
    return q_next, qdot_next


def step(model: ArmModel, state: JointState, tau) -> JointState:
    """Advance the state by one simulator step under joint torque tau."""
    q_next, qdot_next = step_arrays(model, state.q, state.qdot, tau)
    return JointState(q=q_next, qdot=qdot_next)


def step_vjp(
    model: ArmModel, q, qdot, tau, q_bar, qdot_bar
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reverse-mode derivative of step_arrays.

    Given adjoints (q_bar, qdot_bar) of the step outputs, return the adjoints
    of (q, qdot, tau). For qdot_bar = 0 the tau part is dt^2 M(q)^-1 q_bar.
    """
    q, qdot, tau, q_bar, qdot_bar = _check(
        model, q=q, qdot=qdot, tau=tau, q_bar=q_bar, qdot_bar=qdot_bar
    )
    dt = model.dt
    theta = np.cumsum(q, axis=-1)
    omega = np.cumsum(qdot, axis=-1)
    cos_part, sin_part = _angle_terms(model, theta)
    accel = np.cumsum(forward_dynamics(model, q, qdot, tau), axis=-1)

    theta_bar_next = _from_joint_space(q_bar)
    omega_bar_next = _from_joint_space(qdot_bar) + dt * theta_bar_next
    lam = _spd_solve(_absolute_mass_matrix(model, cos_part), dt * omega_bar_next)

    def mv(mat, vec):
        return np.einsum("...ab,...b->...a", mat, vec)

    omega_sq = omega * omega
    p_lam = mv(sin_part, lam)
    theta_bar = (
        theta_bar_next
        + lam * mv(sin_part, accel)
        + accel * p_lam
        - lam * mv(cos_part, omega_sq)
        + omega_sq * mv(cos_part, lam)
        - lam * model.gravity * model.gravity_moments * np.cos(theta)
    )
    omega_bar = omega_bar_next + 2.0 * omega * p_lam
    return _to_joint_space(theta_bar), _to_joint_space(omega_bar), _differences(lam)


def kinetic_energy(model: ArmModel, q, qdot) -> np.ndarray:
    q, qdot = _check(model, q=q, qdot=qdot)
    return 0.5 * np.einsum("...a,...ab,...b->...", qdot, mass_matrix(model, q), qdot)


def potential_energy(model: ArmModel, q) -> np.ndarray:
    """Gravitational energy relative to the hanging rest pose (>= 0)."""
    (q,) = _check(model, q=q)
    theta = np.cumsum(q, axis=-1)
    return model.gravity * np.sum(model.gravity_moments * (1.0 - np.cos(theta)), axis=-1)


def enforce_joint_limits(model: ArmModel, q, qdot) -> Tuple[np.ndarray, np.ndarray]:
    """Clamp q to the joint limits and zero the velocity of every clamped joint."""
    lo, hi = model.joint_limits[:, 0], model.joint_limits[:, 1]
    hit = (q < lo) | (q > hi)
    if np.any(hit):
        q = np.clip(q, lo, hi)
        qdot = np.where(hit, 0.0, qdot)
    return q, qdot
