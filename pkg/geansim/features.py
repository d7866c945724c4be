# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Delta-history network inputs and the normalization statistics behind them.

A history window holds H*s + 1 samples, oldest first. The feature vector is

    [q_t, q_{t-s} - q_t, ..., q_{t-Hs} - q_t, u_t, u_{t-s} - u_t, ..., u_{t-Hs} - u_t]

so its dimension is 2 * n * (H + 1). Differences to the current value make
near-identical consecutive measurements distinguishable after scaling.
"""

from typing import Iterable, Tuple

import numpy as np

from . import constants, dynamics
from .errors import ShapeError, TrajectoryTooShortError
from .models import ArmModel, DatasetStats, Trajectory


def feature_dim(n_joints: int, history_length: int) -> int:
    return 2 * n_joints * (history_length + 1)


def delta_history(x_hist: np.ndarray, history_length: int, stride: int) -> np.ndarray:
    """(..., H*s+1, n) window -> (..., n*(H+1)) of [x_t, x_{t-s} - x_t, ...]."""
    x_hist = np.asarray(x_hist, dtype=np.float64)
    window = history_length * stride
    if x_hist.ndim < 2 or x_hist.shape[-2] != window + 1:
        raise ShapeError(
            f"history has shape {x_hist.shape}, expected (..., {window + 1}, n) "
            f"for history_length={history_length}, stride={stride}"
        )
    current = x_hist[..., -1, :]
    # Offsets s, 2s, ..., Hs into the past.
    past = x_hist[..., window - stride :: -stride, :][..., :history_length, :]
    deltas = past - current[..., None, :]
    blocks = np.concatenate([current[..., None, :], deltas], axis=-2)
    return blocks.reshape(*blocks.shape[:-2], -1)


def delta_history_vjp(block_bar: np.ndarray, history_length: int, stride: int) -> np.ndarray:
    """Adjoint of delta_history: (..., n*(H+1)) -> (..., H*s+1, n)."""
    window = history_length * stride
    blocks = block_bar.reshape(*block_bar.shape[:-1], history_length + 1, -1)
    n = blocks.shape[-1]
    hist_bar = np.zeros((*blocks.shape[:-2], window + 1, n))
    deltas = blocks[..., 1:, :]
    hist_bar[..., -1, :] = blocks[..., 0, :] - deltas.sum(axis=-2)
    hist_bar[..., window - stride :: -stride, :] += deltas
    return hist_bar


def raw_features(q_hist, u_hist, history_length: int, stride: int) -> np.ndarray:
    """Un-normalized features from matching q and u windows."""
    q_hist = np.asarray(q_hist, dtype=np.float64)
    u_hist = np.asarray(u_hist, dtype=np.float64)
    if q_hist.shape != u_hist.shape:
        raise ShapeError(f"q history {q_hist.shape} and u history {u_hist.shape} differ")
    return np.concatenate(
        [
            delta_history(q_hist, history_length, stride),
            delta_history(u_hist, history_length, stride),
        ],
        axis=-1,
    )


def normalize(features: np.ndarray, stats: DatasetStats) -> np.ndarray:
    return (features - stats.feature_mean) / stats.feature_std


def build_features(q_hist, u_hist, stats: DatasetStats) -> np.ndarray:
    """Normalized delta-history features for one window or a batch of windows."""
    features = raw_features(q_hist, u_hist, stats.history_length, stats.stride)
    if features.shape[-1] != np.shape(stats.feature_mean)[0]:
        raise ShapeError(
            f"features have dimension {features.shape[-1]}, "
            f"normalizer expects {np.shape(stats.feature_mean)[0]}"
        )
    return normalize(features, stats)


def standardize_torque(tau: np.ndarray, stats: DatasetStats) -> np.ndarray:
    return (tau - stats.torque_mean) / stats.torque_std


def destandardize_torque(tau_std: np.ndarray, stats: DatasetStats) -> np.ndarray:
    return tau_std * stats.torque_std + stats.torque_mean


def gather_windows(x: np.ndarray, t: np.ndarray, window: int) -> np.ndarray:
    """Stack x[t - window : t + 1] for each index in t; shape (len(t), window + 1, n)."""
    t = np.asarray(t, dtype=np.int64)
    offsets = np.arange(-window, 1)
    return x[t[:, None] + offsets[None, :]]


def label_indices(length: int, window: int) -> np.ndarray:
    """Interior samples that have both a full history window and a torque label."""
    return np.arange(max(window, 1), length - 1)


def finite_differences(traj: Trajectory) -> Tuple[np.ndarray, np.ndarray]:
    """Backward-difference velocity and central-difference acceleration at samples 1 .. T-2."""
    if len(traj) < 3:
        raise TrajectoryTooShortError(
            f"trajectory has {len(traj)} samples, finite differences need at least 3"
        )
    q = traj.q
    qdot = (q[1:-1] - q[:-2]) / traj.dt
    qddot = (q[2:] - 2.0 * q[1:-1] + q[:-2]) / traj.dt**2
    return qdot, qddot


def trajectory_torque_labels(arm: ArmModel, traj: Trajectory) -> np.ndarray:
    """Inverse-dynamics labels for samples 1 .. T-2."""
    qdot, qddot = finite_differences(traj)
    return dynamics.inverse_dynamics(arm, traj.q[1:-1], qdot, qddot)


def _spread(values: np.ndarray) -> np.ndarray:
    std = values.std(axis=0)
    return np.where(std < constants.STD_FLOOR, 1.0, std)


def compute_stats(
    arm: ArmModel,
    trajectories: Iterable[Trajectory],
    history_length: int,
    stride: int,
) -> DatasetStats:
    """Per-feature and per-joint torque mean/std over every labelled window of the trajectories."""
    features, torques = labelled_windows(arm, trajectories, history_length, stride)
    if features.shape[0] == 0:
        raise TrajectoryTooShortError(
            f"no trajectory is long enough for a history window of "
            f"{history_length * stride} samples"
        )
    return DatasetStats(
        history_length=history_length,
        stride=stride,
        feature_mean=features.mean(axis=0),
        feature_std=_spread(features),
        torque_mean=torques.mean(axis=0),
        torque_std=_spread(torques),
    )


def labelled_windows(
    arm: ArmModel, trajectories: Iterable[Trajectory], history_length: int, stride: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Raw features and torque labels of every labelled window, concatenated."""
    window = history_length * stride
    features, torques = [], []
    for traj in trajectories:
        idx = label_indices(len(traj), window)
        if idx.size == 0:
            continue
        features.append(
            raw_features(
                gather_windows(traj.q, idx, window),
                gather_windows(traj.u, idx, window),
                history_length,
                stride,
            )
        )
        # Labels start at sample 1.
        torques.append(trajectory_torque_labels(arm, traj)[idx - 1])
    n = arm.n_joints
    if not features:
        return np.zeros((0, feature_dim(n, history_length))), np.zeros((0, n))
    return np.concatenate(features), np.concatenate(torques)
