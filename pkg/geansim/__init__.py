# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

# This file marks the geansim directory as a Python package.

__version__ = "0.1.0"

__all__ = [
    "ArmModel",
    "PlantModel",
    "JointState",
    "PlantState",
    "Trajectory",
    "Dataset",
    "DatasetStats",
    "GeanConfig",
    "EnvConfig",
    "GeanModel",
    "Ensemble",
    "ReacherEnv",
    "collect_dataset",
    "split_dataset",
    "load_dataset",
    "save_dataset",
    "train",
    "train_ensemble",
    "load_model",
    "load_ensemble",
    "save_model",
    "save_ensemble",
    "replay_error",
    "load_arm_preset",
    "load_plant_preset",
    "load_all_arm_presets",
    "load_all_plant_presets",
    "load_run_config",
]

from .config_loader import load_run_config
from .datagen import collect_dataset, load_dataset, save_dataset, split_dataset
from .evalharness import replay_error
from .gean import (
    Ensemble,
    GeanModel,
    load_ensemble,
    load_model,
    save_ensemble,
    save_model,
    train,
    train_ensemble,
)
from .models import (
    ArmModel,
    Dataset,
    DatasetStats,
    EnvConfig,
    GeanConfig,
    JointState,
    PlantModel,
    PlantState,
    Trajectory,
)
from .preset_loader import (
    load_all_arm_presets,
    load_all_plant_presets,
    load_arm_preset,
    load_plant_preset,
)
from .reacher_env import ReacherEnv
