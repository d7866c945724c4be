# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Shared constants (single source of truth for defaults used across modules)."""

from typing import Tuple

# Container formats
DATASET_FORMAT_VERSION = 1
CHECKPOINT_FORMAT_VERSION = 1
DATASET_KIND = "dataset"
MODEL_KIND = "gean-model"
ENSEMBLE_KIND = "gean-ensemble"
FLOAT_FORMAT = "%.17g"  # 17 significant digits: lossless for float64

# Simulator
DEFAULT_DT = 0.002  # s, 500 Hz
DEFAULT_GRAVITY = 9.81  # m/s^2

# Plant
FRICTION_VELOCITY_SCALE = 0.05  # rad/s, tanh smoothing of Coulomb friction
SHAPE_FLOOR = 0.2  # lower clip of the contraction shaping factor

# Exploration data
DEFAULT_KNOT_INTERVAL = 0.5  # s
DEFAULT_TRAJ_DURATION = 2.0  # s
DEFAULT_TRAIN_FRACTION = 0.8

# GeAN training
DEFAULT_HISTORY_LENGTH = 3
DEFAULT_HISTORY_STRIDE = 1
DEFAULT_HIDDEN_LAYERS = 2
DEFAULT_HIDDEN_WIDTH = 512
DEFAULT_LEARNING_RATE = 1e-4
DEFAULT_EPOCHS = 150
DEFAULT_BATCH_SIZE = 256
DEFAULT_ENSEMBLE_SIZE = 5
ADAM_BETAS: Tuple[float, float] = (0.9, 0.999)
ADAM_EPS = 1e-8
LOSS_KINDS: Tuple[str, ...] = ("torque", "position", "multistep")
STD_FLOOR = 1e-12  # columns with smaller spread are left unscaled

# Evaluation
DEFAULT_HORIZONS: Tuple[int, ...] = (1, 500)
DEFAULT_BOOTSTRAP_RESAMPLES = 10_000
TEST_SEED_OFFSET = 10_007  # test sets come from a seed stream disjoint from training data
# Desk ablation grids
ABLATION_SEEDS: Tuple[int, ...] = (0, 1, 2)
ABLATION_DATASET_SIZES: Tuple[int, ...] = (50, 200, 800)
ABLATION_HISTORY_LENGTHS: Tuple[int, ...] = (1, 3, 10)
ABLATION_HISTORY_STRIDES: Tuple[int, ...] = (1, 4)
ABLATION_ROLLOUT_LENGTHS: Tuple[int, ...] = (1, 5)
REPORT_COLUMNS: Tuple[str, ...] = (
    "metric",
    "provider",
    "horizon_steps",
    "mean_deg",
    "ci_lo",
    "ci_hi",
    "n_traj",
)

# Reacher task (angles in degrees; converted where used)
EPISODE_SECONDS = 2.0
ACTION_REPEAT = 5
DELTA_U_MAX = 0.01
U_INIT_BOUNDS: Tuple[Tuple[float, float], ...] = (
    (-0.5, 0.5),
    (-0.6, 0.0),
    (-0.6, 0.4),
    (-0.5, 0.5),
)
Q_LIMITS_DEG: Tuple[Tuple[float, float], ...] = (
    (-90.0, 90.0),
    (-75.0, 85.0),
    (-85.0, 85.0),
    (-85.0, 85.0),
)
GOAL_BOUNDS_DEG: Tuple[Tuple[float, float], ...] = (
    (-50.0, 50.0),
    (20.0, 60.0),
    (-50.0, 50.0),
    (-50.0, 50.0),
)
RESET_POSE_DEG: Tuple[float, ...] = (0.0, 45.0, 45.0, 0.0)
SETTLE_STEPS = 500
C_ACT = 1250.0
C_DISAG = 0.025
C_LIM = 1.0
LIMIT_MARGIN_DEG = 5.0
SUCCESS_THRESHOLD_DEG = 2.0
COMMAND_RANGE: Tuple[float, float] = (-1.0, 1.0)
