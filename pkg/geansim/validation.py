# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""YAML loading and schema validation (pykwalify)."""

import os

import yaml
from pykwalify.core import Core
from pykwalify.errors import PyKwalifyException

from .errors import ConfigError

SCHEMA_ROOT = os.path.join(os.path.dirname(__file__), "presets", "schemas")


def schema_path(name: str) -> str:
    """Return the built-in path of a schema file, e.g. schema_path("arm_schema.yaml")."""
    return os.path.join(SCHEMA_ROOT, name)


def _first_error(exc: PyKwalifyException) -> str:
    errors = getattr(exc, "msg", None) or str(exc)
    return str(errors).strip()


def validate_yaml_schema(yaml_path, schema_file):
    """Validate a YAML file against a pykwalify schema; raises ConfigError on failure."""
    core = Core(source_file=str(yaml_path), schema_files=[str(schema_file)])
    try:
        core.validate(raise_exception=True)
    except PyKwalifyException as exc:
        raise ConfigError(_first_error(exc), key_path=str(yaml_path)) from exc


def validate_yaml_data(data, schema_file, where: str = "<data>"):
    """Validate already-loaded YAML data against a pykwalify schema."""
    core = Core(source_data=data, schema_files=[str(schema_file)])
    try:
        core.validate(raise_exception=True)
    except PyKwalifyException as exc:
        raise ConfigError(_first_error(exc), key_path=where) from exc


def load_yaml(filepath):
    """Load and return the contents of a YAML file as a dict."""
    with open(filepath, "r") as f:
        return yaml.safe_load(f)
