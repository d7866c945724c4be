# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Replay-error evaluation and ablation sweeps.

A replay sets the simulator to a logged state, applies the logged commands
through a torque provider and compares the simulated positions with the log.
Histories start from logged samples and are then fed from simulated
positions, so a learned model sees the consequences of its own predictions.
"""

import csv
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import constants, dynamics
from .datagen import collect_dataset, torque_labels
from .errors import HorizonError, InputRangeError
from .features import gather_windows
from .gean import Ensemble, GeanModel, disagreement, predict_torque, train, train_ensemble
from .models import ArmModel, Dataset, GeanConfig, PlantModel, Trajectory
from .parallel import parallel_map, spawn_seeds

logger = logging.getLogger(__name__)


class TorqueProvider:
    """Source of joint torques during a replay.

    for_trajectory returns a callable (q_hist, u_hist, k) -> tau, where k is the
    index of the current sample in the trajectory.
    """

    name = "provider"
    window = 0

    def for_trajectory(self, traj: Trajectory, rng: np.random.Generator):
        raise NotImplementedError


class GeanProvider(TorqueProvider):
    def __init__(self, model: GeanModel, name: str = "gean"):
        self.model = model
        self.name = name
        self.window = model.window

    def for_trajectory(self, traj, rng):
        return lambda q_hist, u_hist, k: predict_torque(self.model, q_hist, u_hist)


class EnsembleProvider(TorqueProvider):
    """Draws a member uniformly at random for every simulator step."""

    def __init__(self, ensemble: Ensemble, name: str = "ensemble"):
        self.ensemble = ensemble
        self.name = name
        self.window = ensemble.window

    def for_trajectory(self, traj, rng):
        def torque(q_hist, u_hist, k):
            return predict_torque(self.ensemble.sample_member(rng), q_hist, u_hist)

        return torque


class ZeroTorqueProvider(TorqueProvider):
    name = "zero-torque"

    def __init__(self, window: int = 0):
        self.window = window

    def for_trajectory(self, traj, rng):
        return lambda q_hist, u_hist, k: np.zeros(q_hist.shape[-1])


class LabelProvider(TorqueProvider):
    """Plays back the inverse-dynamics labels of the replayed trajectory."""

    name = "labels"

    def __init__(self, arm: ArmModel, window: int = 0):
        self.arm = arm
        self.window = window

    def for_trajectory(self, traj, rng):
        labels = torque_labels(self.arm, traj)
        # Labels start at sample 1.
        return lambda q_hist, u_hist, k: labels[k - 1]


def replay_trajectory(
    arm: ArmModel,
    torque,
    traj: Trajectory,
    window: int,
    start: int,
    steps: int,
) -> np.ndarray:
    """Simulated positions for samples start .. start + steps (first row is logged)."""
    if start < max(window, 1):
        raise InputRangeError(f"replay start {start} leaves no room for a {window}-sample history")
    if start + steps > len(traj) - 1:
        raise HorizonError(
            f"horizon {steps} from sample {start} exceeds trajectory of {len(traj)} samples"
        )
    q_seq = traj.q.copy()
    qdot = (traj.q[start] - traj.q[start - 1]) / arm.dt
    for k in range(start, start + steps):
        tau = torque(q_seq[k - window : k + 1], traj.u[k - window : k + 1], k)
        q_seq[k + 1], qdot = dynamics.step_arrays(arm, q_seq[k], qdot, tau)
    return q_seq[start : start + steps + 1]


def bootstrap_ci(
    values: np.ndarray, resamples: int, seed: int, level: float = 0.95
) -> Tuple[float, float, float]:
    """Mean and percentile bootstrap interval over the entries of values."""
    values = np.asarray(values, dtype=np.float64)
    mean = float(values.mean())
    if values.size == 1:
        return mean, mean, mean
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, values.size, size=(resamples, values.size))
    samples = values[idx].mean(axis=1)
    tail = (1.0 - level) / 2.0
    lo = float(np.quantile(samples, tail))
    hi = float(np.quantile(samples, 1.0 - tail))
    # Rounding can push a tight interval past the mean.
    return mean, min(lo, mean), max(hi, mean)


@dataclass
class ReplayReport:
    """Per-horizon replay errors (degrees) for one or more providers."""

    horizons: List[int]
    start: int
    per_trajectory: Dict[str, np.ndarray] = field(default_factory=dict)
    rows: List[dict] = field(default_factory=list)

    def row(self, provider: str, horizon: int) -> dict:
        for row in self.rows:
            if row["provider"] == provider and row["horizon_steps"] == horizon:
                return row
        raise KeyError((provider, horizon))

    def mean(self, provider: str, horizon: int) -> float:
        return self.row(provider, horizon)["mean_deg"]

    def write_csv(self, path) -> None:
        write_rows(path, list(constants.REPORT_COLUMNS), self.rows)

    def write_trajectory_csv(self, path) -> None:
        """One row per (provider, trajectory) with the error at every horizon."""
        columns = ["provider", "trajectory"] + [f"h{h}_deg" for h in self.horizons]
        rows = []
        for provider, errors in self.per_trajectory.items():
            for i, per_h in enumerate(errors.T):
                row = {"provider": provider, "trajectory": i}
                row.update({f"h{h}_deg": float(e) for h, e in zip(self.horizons, per_h)})
                rows.append(row)
        write_rows(path, columns, rows)


def _format(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def write_rows(path, columns: Sequence[str], rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _format(row.get(k, "")) for k in columns})


@dataclass
class _ReplayJob:
    arm: ArmModel
    provider: TorqueProvider
    traj: Trajectory
    horizons: Tuple[int, ...]
    start: int
    seed: np.random.SeedSequence


def _replay_one(job: _ReplayJob) -> np.ndarray:
    rng = np.random.default_rng(job.seed)
    torque = job.provider.for_trajectory(job.traj, rng)
    steps = max(job.horizons)
    q_sim = replay_trajectory(job.arm, torque, job.traj, job.provider.window, job.start, steps)
    logged = job.traj.q[job.start : job.start + steps + 1]
    err = np.rad2deg(np.abs(q_sim - logged)).mean(axis=1)
    return err[list(job.horizons)]


def _provider_errors(arm, provider, trajectories, horizons, start, seed, jobs) -> np.ndarray:
    jobs_list = [
        _ReplayJob(arm, provider, traj, tuple(horizons), start, child)
        for traj, child in zip(trajectories, spawn_seeds(seed, len(trajectories)))
    ]
    return np.array(parallel_map(_replay_one, jobs_list, jobs=jobs)).T


def replay_error(
    arm: ArmModel,
    provider,
    test_set: Dataset,
    horizons: Sequence[int] = constants.DEFAULT_HORIZONS,
    bootstrap_resamples: int = constants.DEFAULT_BOOTSTRAP_RESAMPLES,
    seed: int = 0,
    start: Optional[int] = None,
    include_baseline: bool = True,
    jobs: int = 1,
) -> ReplayReport:
    """Mean absolute replay error in degrees at each horizon, with bootstrap CIs.

    provider may be a GeanModel, an Ensemble or any TorqueProvider. Replays
    start at the earliest sample with a full history window unless start is
    given. The zero-torque baseline is evaluated from the same start.
    """
    if isinstance(provider, GeanModel):
        provider.check_arm(arm)
        provider = GeanProvider(provider)
    elif isinstance(provider, Ensemble):
        provider.check_arm(arm)
        provider = EnsembleProvider(provider)
    horizons = [int(h) for h in horizons]
    if not horizons or min(horizons) < 1:
        raise InputRangeError(f"horizons must be >= 1, got {horizons}")
    if len(test_set) == 0:
        raise InputRangeError("test set has no trajectories")
    start = max(provider.window, 1) if start is None else start
    shortest = min(len(traj) for traj in test_set.trajectories)
    if start + max(horizons) > shortest - 1:
        raise HorizonError(
            f"horizon {max(horizons)} from sample {start} exceeds the shortest test "
            f"trajectory ({shortest} samples)"
        )
    providers = [provider]
    if include_baseline and not isinstance(provider, ZeroTorqueProvider):
        providers.append(ZeroTorqueProvider())
    report = ReplayReport(horizons=horizons, start=start)
    for prov in providers:
        errors = _provider_errors(arm, prov, test_set.trajectories, horizons, start, seed, jobs)
        report.per_trajectory[prov.name] = errors
        for h, per_traj in zip(horizons, errors):
            mean, lo, hi = bootstrap_ci(per_traj, bootstrap_resamples, seed)
            report.rows.append(
                {
                    "metric": "replay_mae",
                    "provider": prov.name,
                    "horizon_steps": h,
                    "mean_deg": mean,
                    "ci_lo": lo,
                    "ci_hi": hi,
                    "n_traj": int(per_traj.size),
                }
            )
        logger.info(
            "%s: %s",
            prov.name,
            ", ".join(f"{h} steps {e.mean():.4g} deg" for h, e in zip(horizons, errors)),
        )
    return report


def heldout_disagreement(ensemble: Ensemble, test_set: Dataset) -> float:
    """Mean (over windows and joints) member disagreement on logged test windows."""
    window = ensemble.window
    values = []
    for traj in test_set.trajectories:
        idx = np.arange(window, len(traj))
        if idx.size == 0:
            continue
        q_hist = gather_windows(traj.q, idx, window)
        u_hist = gather_windows(traj.u, idx, window)
        values.append(disagreement(ensemble, q_hist, u_hist).mean())
    return float(np.mean(values)) if values else 0.0


@dataclass
class AblationTable:
    """Replay rows tagged with the swept parameters."""

    parameters: List[str]
    rows: List[dict] = field(default_factory=list)
    extra_columns: List[str] = field(default_factory=list)

    @property
    def columns(self) -> List[str]:
        return self.parameters + list(constants.REPORT_COLUMNS) + self.extra_columns

    def add(self, report: ReplayReport, **values) -> None:
        for row in report.rows:
            self.rows.append({**values, **row})

    def write_csv(self, path) -> None:
        write_rows(path, self.columns, self.rows)

    def select(self, provider: str, horizon: int, **values) -> List[dict]:
        return [
            row
            for row in self.rows
            if row["provider"] == provider
            and row["horizon_steps"] == horizon
            and all(row.get(k) == v for k, v in values.items())
        ]


def _common_start(configs: Sequence[GeanConfig]) -> int:
    return max(max(c.window for c in configs), 1)


def ablate_dataset_size(
    sizes: Sequence[int],
    seeds: Sequence[int],
    config: GeanConfig,
    plant: PlantModel,
    arm: ArmModel,
    test_set: Optional[Dataset] = None,
    n_test: int = 50,
    horizons: Sequence[int] = constants.DEFAULT_HORIZONS,
    bootstrap_resamples: int = constants.DEFAULT_BOOTSTRAP_RESAMPLES,
    data_kwargs: Optional[dict] = None,
    jobs: int = 1,
) -> AblationTable:
    """Train ensembles on growing prefixes of one exploration pool per seed.

    Replay error uses member 0 (a single model, as in a training-loss
    comparison); mean_disagreement is the ensemble's held-out disagreement.
    """
    data_kwargs = dict(data_kwargs or {})
    if test_set is None:
        test_set = collect_dataset(
            plant, arm, n_test, seed=constants.TEST_SEED_OFFSET, **data_kwargs
        )
    table = AblationTable(["dataset_size", "seed"], extra_columns=["mean_disagreement"])
    start = _common_start([config])
    for seed in seeds:
        pool = collect_dataset(plant, arm, max(sizes), seed=seed, jobs=jobs, **data_kwargs)
        for size in sizes:
            if size > len(pool):
                raise InputRangeError(f"size {size} exceeds the {len(pool)} collected trajectories")
            subset = Dataset(arm=arm, trajectories=pool.trajectories[:size])
            ensemble = train_ensemble(replace(config, seed=seed), arm, subset, jobs=jobs)
            report = replay_error(
                arm,
                GeanProvider(ensemble.members[0]),
                test_set,
                horizons,
                bootstrap_resamples,
                seed=seed,
                start=start,
            )
            spread = heldout_disagreement(ensemble, test_set)
            for row in report.rows:
                table.rows.append(
                    {"dataset_size": size, "seed": seed, **row, "mean_disagreement": spread}
                )
            logger.info("dataset size %d, seed %d done", size, seed)
    return table


def ablate_history(
    lengths: Sequence[int],
    strides: Sequence[int],
    config: GeanConfig,
    dataset: Dataset,
    arm: ArmModel,
    test_set: Dataset,
    seeds: Sequence[int] = (0,),
    horizons: Sequence[int] = constants.DEFAULT_HORIZONS,
    bootstrap_resamples: int = constants.DEFAULT_BOOTSTRAP_RESAMPLES,
) -> AblationTable:
    """Cartesian sweep over history length and stride; every cell replays from the same start."""
    grid = [
        replace(config, history_length=h, history_stride=s, seed=seed)
        for h in lengths
        for s in strides
        for seed in seeds
    ]
    start = _common_start(grid)
    table = AblationTable(["history_length", "history_stride", "seed"])
    for cell in grid:
        model = train(cell, arm, dataset)
        report = replay_error(
            arm, model, test_set, horizons, bootstrap_resamples, seed=cell.seed, start=start
        )
        table.add(
            report,
            history_length=cell.history_length,
            history_stride=cell.history_stride,
            seed=cell.seed,
        )
        logger.info("H=%d s=%d seed %d done", cell.history_length, cell.history_stride, cell.seed)
    return table


def ablate_rollout_length(
    rollout_lengths: Sequence[int],
    config: GeanConfig,
    dataset: Dataset,
    arm: ArmModel,
    test_set: Dataset,
    seeds: Sequence[int] = (0,),
    horizons: Sequence[int] = constants.DEFAULT_HORIZONS,
    bootstrap_resamples: int = constants.DEFAULT_BOOTSTRAP_RESAMPLES,
) -> AblationTable:
    """Multistep-loss models for each rollout length R; R = 1 is the one-step position loss."""
    table = AblationTable(["rollout_length", "seed"])
    start = _common_start([config])
    for seed in seeds:
        for r in rollout_lengths:
            kind = "position" if r == 1 else "multistep"
            cell = replace(config, loss_kind=kind, rollout_length=r, seed=seed)
            model = train(cell, arm, dataset)
            report = replay_error(
                arm, model, test_set, horizons, bootstrap_resamples, seed=seed, start=start
            )
            table.add(report, rollout_length=r, seed=seed)
            logger.info("R=%d seed %d done", r, seed)
    return table


def ablate_loss(
    config: GeanConfig,
    dataset: Dataset,
    arm: ArmModel,
    test_set: Dataset,
    seeds: Sequence[int] = (0,),
    kinds: Sequence[str] = ("torque", "position"),
    horizons: Sequence[int] = constants.DEFAULT_HORIZONS,
    bootstrap_resamples: int = constants.DEFAULT_BOOTSTRAP_RESAMPLES,
) -> AblationTable:
    """Same data, same seeds, one model per training loss.

    Rows hold the trained model only; the zero-torque baseline does not depend
    on the loss and is left out.
    """
    table = AblationTable(["loss_kind", "seed"])
    start = _common_start([config])
    for seed in seeds:
        for kind in kinds:
            model = train(replace(config, loss_kind=kind, seed=seed), arm, dataset)
            report = replay_error(
                arm,
                model,
                test_set,
                horizons,
                bootstrap_resamples,
                seed=seed,
                start=start,
                include_baseline=False,
            )
            table.add(report, loss_kind=kind, seed=seed)
            logger.info("loss %s seed %d done", kind, seed)
    return table
