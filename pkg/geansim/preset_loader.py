# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Load built-in arm and plant presets from YAML into model objects."""

import os
from typing import Dict

import numpy as np

from .errors import ConfigError, GeansimError
from .models import ArmModel, PlantModel
from .validation import load_yaml, schema_path, validate_yaml_data, validate_yaml_schema

PRESET_ROOT = os.path.join(os.path.dirname(__file__), "presets")

_ARM_FIELDS = ("name", "link_length", "com_offset", "mass", "inertia_zz", "gravity", "dt")
_PLANT_FIELDS = (
    "name",
    "pressure_time_constant",
    "max_pressure",
    "force_gain",
    "contraction_nonlinearity",
    "coulomb_friction",
    "viscous_friction",
    "friction_angle_gain",
    "hysteresis_width",
)


def _preset_file(kind: str, name: str) -> str:
    path = os.path.join(PRESET_ROOT, kind, f"{name}.yml")
    if not os.path.isfile(path):
        available = sorted(_preset_names(kind))
        raise ConfigError(f"unknown {kind[:-1]} preset {name!r}; available: {available}")
    return path


def _preset_names(kind: str):
    root = os.path.join(PRESET_ROOT, kind)
    for file in os.listdir(root):
        if file.endswith(".yml") or file.endswith(".yaml"):
            yield os.path.splitext(file)[0]


def arm_from_dict(data: Dict, where: str = "arm") -> ArmModel:
    """Build an ArmModel from a schema-validated mapping (limits given in degrees)."""
    validate_yaml_data(data, schema_path("arm_schema.yaml"), where=where)
    kwargs = {key: data[key] for key in _ARM_FIELDS if key in data}
    if "joint_limits_deg" in data:
        kwargs["joint_limits"] = np.deg2rad(np.array(data["joint_limits_deg"], dtype=np.float64))
    try:
        return ArmModel(**kwargs)
    except GeansimError as exc:
        raise ConfigError(str(exc), key_path=where) from exc


def plant_from_dict(data: Dict, where: str = "plant") -> PlantModel:
    """Build a PlantModel from a schema-validated mapping."""
    validate_yaml_data(data, schema_path("plant_schema.yaml"), where=where)
    try:
        return PlantModel(**{key: data[key] for key in _PLANT_FIELDS})
    except GeansimError as exc:
        raise ConfigError(str(exc), key_path=where) from exc


def load_arm_data(name: str) -> Dict:
    path = _preset_file("arms", name)
    validate_yaml_schema(path, schema_path("arm_schema.yaml"))
    return load_yaml(path)


def load_plant_data(name: str) -> Dict:
    path = _preset_file("plants", name)
    validate_yaml_schema(path, schema_path("plant_schema.yaml"))
    return load_yaml(path)


def load_arm_preset(name: str) -> ArmModel:
    """Load a built-in arm preset, e.g. load_arm_preset("desk4")."""
    return arm_from_dict(load_arm_data(name), where=f"arms/{name}")


def load_plant_preset(name: str) -> PlantModel:
    """Load a built-in plant preset, e.g. load_plant_preset("default-messy")."""
    return plant_from_dict(load_plant_data(name), where=f"plants/{name}")


def load_all_arm_presets() -> Dict[str, ArmModel]:
    return {name: load_arm_preset(name) for name in sorted(_preset_names("arms"))}


def load_all_plant_presets() -> Dict[str, PlantModel]:
    """Load all plant presets; returns dict name -> PlantModel."""
    return {name: load_plant_preset(name) for name in sorted(_preset_names("plants"))}
