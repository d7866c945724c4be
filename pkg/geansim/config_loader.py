# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Load a run configuration YAML into a RunConfig.

The document is validated against run_config_schema.yaml before anything is
built. The arm and plant sections start from a preset (desk4 and
default-messy unless named) and override individual fields.
"""

import hashlib
import os
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from . import constants
from .datagen import default_reset
from .errors import ConfigError, GeansimError
from .models import ArmModel, EnvConfig, GeanConfig, PlantModel
from .preset_loader import arm_from_dict, load_arm_data, load_plant_data, plant_from_dict
from .validation import load_yaml, schema_path, validate_yaml_schema

DEFAULT_ARM_PRESET = "desk4"
DEFAULT_PLANT_PRESET = "default-messy"


@dataclass
class DataParams:
    n_traj: int = 200
    n_test_traj: int = 50
    duration: float = constants.DEFAULT_TRAJ_DURATION
    knot_interval: float = constants.DEFAULT_KNOT_INTERVAL
    control_bounds: Optional[np.ndarray] = None
    noise_std: float = 0.0
    seed: int = 0

    def collect_kwargs(self) -> dict:
        """Keyword arguments shared by every collect_dataset call of a run."""
        return {
            "traj_duration": self.duration,
            "knot_interval": self.knot_interval,
            "control_bounds": self.control_bounds,
            "noise_std": self.noise_std,
        }


@dataclass
class EvalParams:
    horizons: Tuple[int, ...] = constants.DEFAULT_HORIZONS
    bootstrap_resamples: int = constants.DEFAULT_BOOTSTRAP_RESAMPLES
    seed: int = 0
    seeds: Tuple[int, ...] = constants.ABLATION_SEEDS
    dataset_sizes: Tuple[int, ...] = constants.ABLATION_DATASET_SIZES
    history_lengths: Tuple[int, ...] = constants.ABLATION_HISTORY_LENGTHS
    history_strides: Tuple[int, ...] = constants.ABLATION_HISTORY_STRIDES
    rollout_lengths: Tuple[int, ...] = constants.ABLATION_ROLLOUT_LENGTHS
    plot: bool = False


@dataclass
class PlanParams:
    planning_horizon: int = 5
    n_candidates: int = 64
    seed: int = 0


@dataclass
class RunConfig:
    arm: ArmModel
    plant: PlantModel
    data: DataParams = field(default_factory=DataParams)
    gean: GeanConfig = field(default_factory=GeanConfig)
    eval: EvalParams = field(default_factory=EvalParams)
    env: EnvConfig = field(default_factory=EnvConfig)
    plan: PlanParams = field(default_factory=PlanParams)
    out_dir: str = "."
    source: Optional[str] = None
    digest: str = ""


def config_digest(path) -> str:
    """sha256 of the raw configuration bytes."""
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def _section(raw: Dict, name: str) -> Dict:
    return dict(raw.get(name) or {})


def _build(where: str, factory, **kwargs):
    try:
        return factory(**kwargs)
    except GeansimError as exc:
        raise ConfigError(str(exc), key_path=where) from exc
    except TypeError as exc:
        raise ConfigError(str(exc), key_path=where) from exc


def _arm(section: Dict) -> ArmModel:
    preset = section.pop("preset", DEFAULT_ARM_PRESET)
    data = load_arm_data(preset)
    data.update(section)
    return arm_from_dict(data, where="arm")


def _plant(section: Dict) -> PlantModel:
    preset = section.pop("preset", DEFAULT_PLANT_PRESET)
    data = load_plant_data(preset)
    data.update(section)
    return plant_from_dict(data, where="plant")


def _data(section: Dict) -> DataParams:
    if "control_bounds" in section:
        section["control_bounds"] = np.array(section["control_bounds"], dtype=np.float64)
    return _build("data", DataParams, **section)


_EVAL_GRIDS = (
    "horizons",
    "seeds",
    "dataset_sizes",
    "history_lengths",
    "history_strides",
    "rollout_lengths",
)


def _eval(section: Dict) -> EvalParams:
    for key in _EVAL_GRIDS:
        if key in section:
            section[key] = tuple(int(v) for v in section[key])
    return _build("eval", EvalParams, **section)


_ENV_DEGREES = {
    "q_limits_deg": "q_limits",
    "goal_bounds_deg": "goal_bounds",
    "reset_pose_deg": "reset_pose",
    "limit_margin_deg": "limit_margin",
}
_PLAN_KEYS = ("planning_horizon", "n_candidates", "seed")


def _env(section: Dict, arm: ArmModel) -> Tuple[EnvConfig, PlanParams]:
    """Environment settings on top of the arm's default reset protocol."""
    plan = {key: section.pop(key) for key in _PLAN_KEYS if key in section}
    for deg_key, rad_key in _ENV_DEGREES.items():
        if deg_key in section:
            section[rad_key] = np.deg2rad(np.array(section.pop(deg_key), dtype=np.float64))
    if "u_init_bounds" in section:
        section["u_init_bounds"] = np.array(section["u_init_bounds"], dtype=np.float64)
    if "limit_margin" in section:
        section["limit_margin"] = float(section["limit_margin"])
    base = default_reset(arm)
    env = _build("env", lambda **changes: replace(base, **changes), **section)
    return env, _build("env", PlanParams, **plan)


def load_run_config(path) -> RunConfig:
    """Validate and load a run configuration; relative paths resolve against its directory."""
    path = os.path.abspath(path)
    if not os.path.isfile(path):
        raise ConfigError(f"configuration file not found: {path}")
    validate_yaml_schema(path, schema_path("run_config_schema.yaml"))
    raw = load_yaml(path) or {}
    arm = _arm(_section(raw, "arm"))
    env, plan = _env(_section(raw, "env"), arm)
    if env.n_joints != arm.n_joints:
        raise ConfigError(
            f"env describes {env.n_joints} joints but the arm has {arm.n_joints}", key_path="env"
        )
    plant = _plant(_section(raw, "plant"))
    if plant.n_joints != arm.n_joints:
        raise ConfigError(
            f"plant drives {plant.n_joints} joints but the arm has {arm.n_joints}",
            key_path="plant",
        )
    out_dir = _section(raw, "io").get("out_dir", ".")
    if not os.path.isabs(out_dir):
        out_dir = os.path.join(os.path.dirname(path), out_dir)
    return RunConfig(
        arm=arm,
        plant=plant,
        data=_data(_section(raw, "data")),
        gean=_build("gean", GeanConfig, **_section(raw, "gean")),
        eval=_eval(_section(raw, "eval")),
        env=env,
        plan=plan,
        out_dir=os.path.normpath(out_dir),
        source=path,
        digest=config_digest(path),
    )
