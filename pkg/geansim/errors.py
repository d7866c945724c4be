# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Exception hierarchy shared by all geansim modules.

Every error derives from GeansimError and from the closest built-in exception,
so ``except ValueError`` keeps working for validation failures. The ``category``
attribute is what the CLI reports and maps to an exit code.
"""

from typing import Optional


class GeansimError(Exception):
    """Base class for all geansim errors."""

    category = "error"


class ShapeError(GeansimError, ValueError):
    """Array argument has the wrong dimension for the model it is used with."""

    category = "input-shape"


class InputRangeError(GeansimError, ValueError):
    """Argument is outside its documented range (controls, bounds, fractions)."""

    category = "input-range"


class TrajectoryTooShortError(GeansimError, ValueError):
    """Trajectory has too few samples for the requested computation."""

    category = "trajectory-too-short"


class EmptySplitError(GeansimError, ValueError):
    """A dataset split would contain no trajectories."""

    category = "empty-split"


class HorizonError(GeansimError, ValueError):
    """Replay horizon exceeds the logged data."""

    category = "horizon"


class ConfigError(GeansimError, ValueError):
    """Configuration failed schema or semantic validation."""

    category = "config"

    def __init__(self, message: str, key_path: Optional[str] = None):
        self.key_path = key_path
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class ParseError(GeansimError, ValueError):
    """Malformed dataset/checkpoint container."""

    category = "parse"

    def __init__(self, path: str, line: Optional[int], message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


class FormatVersionError(ParseError):
    """Container was written with a different format version or kind."""

    category = "format-version"


class ModelMismatchError(GeansimError, ValueError):
    """Model configuration echo does not match the data or arm it is used with."""

    category = "model-mismatch"


class NumericalError(GeansimError, ArithmeticError):
    """A numerical routine failed (e.g. Cholesky of a non-SPD mass matrix)."""

    category = "numerical"


class RolloutDivergedError(NumericalError):
    """Plant rollout produced a non-finite state."""

    category = "rollout-diverged"

    def __init__(self, step: int, message: str = "non-finite joint state"):
        self.step = step
        super().__init__(f"rollout diverged at step {step}: {message}")


class TrainingDivergedError(NumericalError):
    """Training loss became non-finite."""

    category = "training-diverged"

    def __init__(self, epoch: int, batch: int, loss: float):
        self.epoch = epoch
        self.batch = batch
        self.loss = loss
        super().__init__(
            f"non-finite training loss {loss!r} at epoch {epoch}, batch {batch}"
        )


class ZeroNormalizerError(GeansimError, ValueError):
    """Zero-torque normalizer table has a zero entry (static data)."""

    category = "zero-normalizer"


class EpisodeDoneError(GeansimError, RuntimeError):
    """Environment stepped after the episode finished or before reset."""

    category = "contract"
