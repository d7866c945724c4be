# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Generalized actuator networks: torque models learned from joint positions alone.

A GeanModel maps a history window of joint positions and commands to joint
torques. It is trained with one of three losses:

- torque: squared error against standardized inverse-dynamics labels;
- position: squared error of the next simulated position, back-propagated
  through one symplectic Euler step (whose torque Jacobian is dt^2 M^-1);
- multistep: R chained simulator steps whose histories are fed with the
  predicted positions, each step's error divided by the zero-torque table c_r.

The position loss is the R = 1, c = 1 case of the multistep loss and shares
its code path.
"""

import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import constants, dynamics
from .container import Table, read_container, write_container
from .datagen import split_dataset, stats_from_tables, stats_tables
from .errors import (
    InputRangeError,
    ModelMismatchError,
    ParseError,
    ShapeError,
    TrainingDivergedError,
    ZeroNormalizerError,
)
from .features import (
    build_features,
    compute_stats,
    delta_history_vjp,
    feature_dim,
    labelled_windows,
    normalize,
    raw_features,
    destandardize_torque,
    standardize_torque,
)
from .models import ArmModel, Dataset, DatasetStats, GeanConfig, Trajectory
from .network import Adam, Mlp
from .parallel import parallel_map
from .validation import schema_path

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ("epoch", "train_loss", "val_loss")


@dataclass(eq=False)
class GeanModel:
    """Trained network plus the normalizer, torque standardizer and configuration echo."""

    network: Mlp
    stats: DatasetStats
    dt: float
    n_joints: int
    loss_kind: str = "position"
    rollout_length: int = 1
    seed: int = 0
    curve: Optional[np.ndarray] = None

    def __post_init__(self):
        expected_in = feature_dim(self.n_joints, self.stats.history_length)
        if self.network.input_size != expected_in or self.network.output_size != self.n_joints:
            raise ShapeError(
                f"network maps {self.network.input_size} -> {self.network.output_size}, "
                f"expected {expected_in} -> {self.n_joints}"
            )

    @property
    def history_length(self) -> int:
        return int(self.stats.history_length)

    @property
    def history_stride(self) -> int:
        return int(self.stats.stride)

    @property
    def window(self) -> int:
        return self.history_length * self.history_stride

    def predict(self, q_hist, u_hist) -> np.ndarray:
        return predict_torque(self, q_hist, u_hist)

    def check_arm(self, arm: ArmModel) -> None:
        if arm.n_joints != self.n_joints or arm.dt != self.dt:
            raise ModelMismatchError(
                f"model was trained for {self.n_joints} joints at dt={self.dt}, "
                f"arm has {arm.n_joints} joints at dt={arm.dt}"
            )


def predict_torque(model: GeanModel, q_hist, u_hist) -> np.ndarray:
    """De-standardized torque for one window (H*s+1, n) or a batch (..., H*s+1, n)."""
    q_hist = np.asarray(q_hist, dtype=np.float64)
    if q_hist.shape[-1] != model.n_joints:
        raise ShapeError(f"history has {q_hist.shape[-1]} joints, model has {model.n_joints}")
    features = build_features(q_hist, u_hist, model.stats)
    return destandardize_torque(model.network(features), model.stats)


@dataclass(eq=False)
class Ensemble:
    """Independently trained GeANs sharing history configuration, joint count and dt."""

    members: List[GeanModel]

    def __post_init__(self):
        if not self.members:
            raise InputRangeError("an ensemble needs at least one member")
        first = self.members[0]
        for i, member in enumerate(self.members[1:], start=1):
            echo = (member.history_length, member.history_stride, member.n_joints, member.dt)
            if echo != (first.history_length, first.history_stride, first.n_joints, first.dt):
                raise ModelMismatchError(
                    f"member {i} has (H, s, n, dt) = {echo}, member 0 has "
                    f"{(first.history_length, first.history_stride, first.n_joints, first.dt)}"
                )

    def __len__(self) -> int:
        return len(self.members)

    @property
    def n_joints(self) -> int:
        return self.members[0].n_joints

    @property
    def window(self) -> int:
        return self.members[0].window

    @property
    def dt(self) -> float:
        return self.members[0].dt

    def check_arm(self, arm: ArmModel) -> None:
        self.members[0].check_arm(arm)

    def predict_all(self, q_hist, u_hist) -> np.ndarray:
        """Member predictions stacked on a new leading axis."""
        return np.stack([predict_torque(m, q_hist, u_hist) for m in self.members])

    def predict_mean(self, q_hist, u_hist) -> np.ndarray:
        return self.predict_all(q_hist, u_hist).mean(axis=0)

    def sample_member(self, rng: np.random.Generator) -> GeanModel:
        return self.members[int(rng.integers(len(self.members)))]


def disagreement(ensemble: Ensemble, q_hist, u_hist) -> np.ndarray:
    """Per-joint population standard deviation of the member torques."""
    return ensemble.predict_all(q_hist, u_hist).std(axis=0)


def position_error_identity(arm: ArmModel, q, qdot, tau, tau_hat) -> np.ndarray:
    """Residual of (q_next - q_hat_next) - dt^2 M(q)^-1 (tau - tau_hat); zero up to rounding."""
    q_next, _ = dynamics.step_arrays(arm, q, qdot, tau)
    q_hat_next, _ = dynamics.step_arrays(arm, q, qdot, tau_hat)
    m = dynamics.mass_matrix(arm, q)
    tau_err = np.asarray(tau, dtype=np.float64) - np.asarray(tau_hat, dtype=np.float64)
    mapped = np.linalg.solve(m, tau_err[..., None])[..., 0]
    return (q_next - q_hat_next) - arm.dt**2 * mapped


# Losses


def torque_loss_grad(
    model: GeanModel, features: np.ndarray, targets: np.ndarray, grad: bool = True
) -> Tuple[float, Optional[List[np.ndarray]]]:
    """Mean squared error between network output and standardized torque labels."""
    if features.shape[0] == 0:
        raise InputRangeError("empty batch")
    out, cache = model.network.forward(features)
    err = out - targets
    loss = float(np.mean(err * err))
    if not grad:
        return loss, None
    grads, _ = model.network.backward(cache, 2.0 * err / err.size)
    return loss, grads


def rollout_start(window: int) -> int:
    """Index of the current sample inside a rollout window (needs a backward difference)."""
    return max(window, 1)


def rollout_windows(
    trajectories: Sequence[Trajectory], window: int, rollout_length: int
) -> Tuple[np.ndarray, np.ndarray, int]:
    """Cut (q, u) windows for R-step rollouts; returns (q_win, u_win, skipped).

    q_win[:, P] is the start sample, with P = max(window, 1) logged samples
    before it and R logged targets after it. skipped counts labelled samples
    that are too close to the end of their trajectory for R steps.
    """
    p = rollout_start(window)
    r = rollout_length
    q_parts, u_parts = [], []
    skipped = 0
    offsets = np.arange(-p, r + 1)
    for traj in trajectories:
        starts = np.arange(p, len(traj) - r)
        labelled = max(0, len(traj) - 1 - p)
        skipped += labelled - starts.size
        if starts.size == 0:
            continue
        idx = starts[:, None] + offsets[None, :]
        q_parts.append(traj.q[idx])
        u_parts.append(traj.u[idx[:, :-1]])
    n = trajectories[0].n_joints if trajectories else 0
    if not q_parts:
        return np.zeros((0, p + r + 1, n)), np.zeros((0, p + r, n)), skipped
    return np.concatenate(q_parts), np.concatenate(u_parts), skipped


def _rollout_loss(
    model: GeanModel,
    arm: ArmModel,
    q_win: np.ndarray,
    u_win: np.ndarray,
    c_table: np.ndarray,
    grad: bool,
) -> Tuple[float, Optional[List[np.ndarray]]]:
    batch = q_win.shape[0]
    if batch == 0:
        raise InputRangeError("empty batch")
    rollout = c_table.shape[0]
    window = model.window
    h, s = model.history_length, model.history_stride
    p = rollout_start(window)
    if q_win.shape[1] != p + rollout + 1 or u_win.shape[1] != p + rollout:
        raise ShapeError(
            f"rollout windows {q_win.shape}, {u_win.shape} do not fit R={rollout}, start={p}"
        )
    stats = model.stats
    dt = arm.dt
    q_seq = np.array(q_win, dtype=np.float64, copy=True)
    qdot = (q_win[:, p] - q_win[:, p - 1]) / dt
    scale = 1.0 / (batch * model.n_joints * rollout)
    tape = []
    loss = 0.0
    for r in range(rollout):
        cur = p + r
        q_cur = q_seq[:, cur].copy()
        raw = raw_features(q_seq[:, cur - window : cur + 1], u_win[:, cur - window : cur + 1], h, s)
        out, cache = model.network.forward(normalize(raw, stats))
        tau = destandardize_torque(out, stats)
        q_next, qdot_next = dynamics.step_arrays(arm, q_cur, qdot, tau)
        err = (q_next - q_win[:, cur + 1]) / c_table[r]
        loss += float(np.sum(err * err)) * scale
        tape.append((q_cur, qdot, tau, cache, err))
        q_seq[:, cur + 1] = q_next
        qdot = qdot_next
    if not grad:
        return loss, None

    grads = None
    q_seq_bar = np.zeros_like(q_seq)
    qdot_bar = np.zeros((batch, model.n_joints))
    for r in range(rollout - 1, -1, -1):
        cur = p + r
        q_cur, qdot_cur, tau, cache, err = tape[r]
        q_next_bar = q_seq_bar[:, cur + 1] + 2.0 * scale * err / c_table[r]
        q_bar, qdot_bar, tau_bar = dynamics.step_vjp(
            arm, q_cur, qdot_cur, tau, q_next_bar, qdot_bar
        )
        q_seq_bar[:, cur] += q_bar
        layer_grads, x_bar = model.network.backward(cache, tau_bar * stats.torque_std)
        grads = layer_grads if grads is None else [a + b for a, b in zip(grads, layer_grads)]
        q_block = (x_bar / stats.feature_std)[:, : model.n_joints * (h + 1)]
        q_seq_bar[:, cur - window : cur + 1] += delta_history_vjp(q_block, h, s)
    return loss, grads


def position_loss_grad(
    model: GeanModel, arm: ArmModel, q_win: np.ndarray, u_win: np.ndarray, grad: bool = True
) -> Tuple[float, Optional[List[np.ndarray]]]:
    """Mean squared next-position error after one simulator step under the predicted torque.

    q_win is (B, P + 2, n) and u_win (B, P + 1, n) as cut by rollout_windows with R = 1.
    """
    return _rollout_loss(model, arm, q_win, u_win, np.ones((1, model.n_joints)), grad)


def multi_step_loss_grad(
    model: GeanModel,
    arm: ArmModel,
    q_win: np.ndarray,
    u_win: np.ndarray,
    rollout_length: int,
    c_table: np.ndarray,
    grad: bool = True,
) -> Tuple[float, Optional[List[np.ndarray]]]:
    """(1/R) sum_r mean(((q_hat_{t->r} - q_{t+r}) / c_r)^2) over an R-step predicted rollout."""
    c_table = np.asarray(c_table, dtype=np.float64)
    if rollout_length < 1 or c_table.shape != (rollout_length, model.n_joints):
        raise ShapeError(
            f"c-table has shape {c_table.shape}, expected ({rollout_length}, {model.n_joints})"
        )
    return _rollout_loss(model, arm, q_win, u_win, c_table, grad)


def zero_torque_errors(arm: ArmModel, q_win: np.ndarray, rollout_length: int) -> np.ndarray:
    """Per-window absolute error of R zero-torque steps; shape (B, R, n).

    q_win holds one logged sample before the start and R targets after it.
    """
    dt = arm.dt
    q = q_win[:, 1].copy()
    qdot = (q_win[:, 1] - q_win[:, 0]) / dt
    tau = np.zeros_like(q)
    errors = np.empty((q_win.shape[0], rollout_length, q_win.shape[2]))
    for r in range(rollout_length):
        q, qdot = dynamics.step_arrays(arm, q, qdot, tau)
        errors[:, r] = np.abs(q - q_win[:, r + 2])
    return errors


def zero_torque_normalizers(arm: ArmModel, dataset: Dataset, rollout_length: int) -> np.ndarray:
    """c[r-1, j]: mean absolute error of joint j after r zero-torque steps, over every start."""
    if rollout_length < 1:
        raise InputRangeError(f"rollout_length must be >= 1, got {rollout_length}")
    q_win, _, _ = rollout_windows(dataset.trajectories, 0, rollout_length)
    if q_win.shape[0] == 0:
        raise ZeroNormalizerError(
            f"no trajectory is long enough for {rollout_length}-step zero-torque rollouts"
        )
    table = zero_torque_errors(arm, q_win, rollout_length).mean(axis=0)
    if np.any(table <= 0):
        raise ZeroNormalizerError(
            f"zero-torque normalizer has zero entries {np.argwhere(table <= 0).tolist()}; "
            "the trajectories do not excite the arm"
        )
    return table


# Training


@dataclass
class _TrainingData:
    """Everything one loss needs, precomputed for the whole split."""

    kind: str
    features: Optional[np.ndarray] = None
    targets: Optional[np.ndarray] = None
    q_win: Optional[np.ndarray] = None
    u_win: Optional[np.ndarray] = None
    skipped: int = 0

    def __len__(self) -> int:
        return int(self.features.shape[0] if self.kind == "torque" else self.q_win.shape[0])


def _training_data(
    kind: str, arm: ArmModel, trajectories, stats: DatasetStats, rollout_length: int
) -> _TrainingData:
    if kind == "torque":
        features, torques = labelled_windows(arm, trajectories, stats.history_length, stats.stride)
        return _TrainingData(
            kind=kind,
            features=normalize(features, stats),
            targets=standardize_torque(torques, stats),
        )
    window = stats.history_length * stats.stride
    q_win, u_win, skipped = rollout_windows(trajectories, window, rollout_length)
    return _TrainingData(kind=kind, q_win=q_win, u_win=u_win, skipped=skipped)


def _batch_loss(
    model: GeanModel,
    arm: ArmModel,
    data: _TrainingData,
    idx: np.ndarray,
    c_table: np.ndarray,
    grad: bool,
):
    if data.kind == "torque":
        return torque_loss_grad(model, data.features[idx], data.targets[idx], grad=grad)
    return _rollout_loss(model, arm, data.q_win[idx], data.u_win[idx], c_table, grad)


def evaluate_loss(
    model: GeanModel,
    arm: ArmModel,
    data: _TrainingData,
    c_table: np.ndarray,
    batch_size: int,
) -> float:
    """Sample-weighted mean loss over a whole split, without gradients."""
    total, count = 0.0, 0
    for start in range(0, len(data), batch_size):
        idx = np.arange(start, min(start + batch_size, len(data)))
        loss, _ = _batch_loss(model, arm, data, idx, c_table, grad=False)
        total += loss * idx.size
        count += idx.size
    return total / count


def _gradient_scale(kind: str, dt: float) -> float:
    # Raw rollout gradients are O(dt^4) and would sit below Adam's eps.
    return 1.0 if kind == "torque" else dt**-4


def initialize_model(
    config: GeanConfig, arm: ArmModel, stats: DatasetStats, rng: np.random.Generator
) -> GeanModel:
    n = arm.n_joints
    sizes = (
        [feature_dim(n, config.history_length)]
        + [config.hidden_width] * config.hidden_layers
        + [n]
    )
    return GeanModel(
        network=Mlp.initialize(sizes, rng),
        stats=stats,
        dt=arm.dt,
        n_joints=n,
        loss_kind=config.loss_kind,
        rollout_length=config.steps_ahead,
        seed=config.seed,
    )


def _stats_for(config: GeanConfig, arm: ArmModel, train_set: Dataset) -> DatasetStats:
    stats = train_set.stats
    if stats is not None and (stats.history_length, stats.stride) == (
        config.history_length,
        config.history_stride,
    ):
        return stats
    if stats is not None:
        warnings.warn(
            f"dataset stats were computed for H={stats.history_length}, s={stats.stride}; "
            f"recomputing for H={config.history_length}, s={config.history_stride}",
            UserWarning,
            stacklevel=3,
        )
    return compute_stats(arm, train_set.trajectories, config.history_length, config.history_stride)


def train(
    config: GeanConfig,
    arm: ArmModel,
    dataset: Dataset,
    validation: Optional[Dataset] = None,
    c_table: Optional[np.ndarray] = None,
) -> GeanModel:
    """Train one GeAN with Adam and keep the epoch with the lowest validation loss.

    Without a validation set the dataset is split at trajectory granularity with
    config.train_fraction and config.seed. Epoch 0 of the returned curve is the
    initialized model. For the multistep loss the zero-torque table is computed
    on the training split unless c_table is given.
    """
    if validation is None:
        train_set, validation = split_dataset(
            dataset,
            config.train_fraction,
            config.seed,
            config.history_length,
            config.history_stride,
        )
    else:
        train_set = dataset
    stats = _stats_for(config, arm, train_set)
    kind = config.loss_kind
    rollout = config.steps_ahead
    if kind == "position":
        c_table = np.ones((1, arm.n_joints))
    elif kind == "multistep" and c_table is None:
        c_table = zero_torque_normalizers(arm, train_set, rollout)
    train_data = _training_data(kind, arm, train_set.trajectories, stats, rollout)
    val_data = _training_data(kind, arm, validation.trajectories, stats, rollout)
    if train_data.skipped:
        warnings.warn(
            f"{train_data.skipped} training samples skipped: fewer than {rollout} "
            "logged steps remain after them",
            UserWarning,
            stacklevel=2,
        )
    if len(train_data) == 0 or len(val_data) == 0:
        raise InputRangeError(
            f"no usable training windows (train {len(train_data)}, val {len(val_data)}) "
            f"for history window {config.window} and {rollout}-step targets"
        )

    rng = np.random.default_rng(config.seed)
    model = initialize_model(config, arm, stats, rng)
    optimizer = Adam(config.learning_rate, config.adam_betas, config.adam_eps)
    params = model.network.parameters()
    grad_scale = _gradient_scale(kind, arm.dt)

    train_loss = evaluate_loss(model, arm, train_data, c_table, config.batch_size)
    best_val = evaluate_loss(model, arm, val_data, c_table, config.batch_size)
    best_network = model.network.copy()
    curve = [(0, train_loss, best_val)]
    logger.info("epoch 0: train %.6g, val %.6g", train_loss, best_val)

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(train_data))
        total = 0.0
        for batch, start in enumerate(range(0, order.size, config.batch_size)):
            idx = order[start : start + config.batch_size]
            loss, grads = _batch_loss(model, arm, train_data, idx, c_table, grad=True)
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch, batch, loss)
            if grad_scale != 1.0:
                grads = [g * grad_scale for g in grads]
            optimizer.step(params, grads)
            total += loss * idx.size
            logger.debug("epoch %d batch %d: loss %.6g", epoch, batch, loss)
        train_loss = total / order.size
        val_loss = evaluate_loss(model, arm, val_data, c_table, config.batch_size)
        if not np.isfinite(val_loss):
            raise TrainingDivergedError(epoch, -1, val_loss)
        curve.append((epoch, train_loss, val_loss))
        logger.info("epoch %d: train %.6g, val %.6g", epoch, train_loss, val_loss)
        if val_loss < best_val:
            best_val = val_loss
            best_network = model.network.copy()

    model.network = best_network
    model.curve = np.array(curve, dtype=np.float64)
    return model


@dataclass
class _MemberJob:
    config: GeanConfig
    arm: ArmModel
    train_set: Dataset
    validation: Dataset
    c_table: Optional[np.ndarray] = field(default=None)


def _train_member(job: _MemberJob) -> GeanModel:
    logger.info("training ensemble member with seed %d", job.config.seed)
    return train(job.config, job.arm, job.train_set, job.validation, c_table=job.c_table)


def train_ensemble(
    config: GeanConfig,
    arm: ArmModel,
    dataset: Dataset,
    validation: Optional[Dataset] = None,
    jobs: int = 1,
) -> Ensemble:
    """Train config.ensemble_size members with seeds config.seed + i on one shared split."""
    if validation is None:
        train_set, validation = split_dataset(
            dataset,
            config.train_fraction,
            config.seed,
            config.history_length,
            config.history_stride,
        )
    else:
        train_set = dataset
    stats = _stats_for(config, arm, train_set)
    train_set = replace(train_set, stats=stats)
    c_table = None
    if config.loss_kind == "multistep":
        c_table = zero_torque_normalizers(arm, train_set, config.rollout_length)
    member_jobs = [
        _MemberJob(replace(config, seed=config.seed + i), arm, train_set, validation, c_table)
        for i in range(config.ensemble_size)
    ]
    return Ensemble(members=parallel_map(_train_member, member_jobs, jobs=jobs))


def curve_rows(model: GeanModel) -> List[dict]:
    if model.curve is None:
        return []
    return [
        {"epoch": int(e), "train_loss": repr(float(tr)), "val_loss": repr(float(va))}
        for e, tr, va in model.curve
    ]


# Checkpoints


def _member_tables(model: GeanModel, prefix: str) -> List[Table]:
    tables = []
    for i, (w, b) in enumerate(zip(model.network.weights, model.network.biases)):
        tables.append(Table(f"{prefix}layer{i}.weight", [f"w{j}" for j in range(w.shape[1])], w))
        tables.append(Table(f"{prefix}layer{i}.bias", ["b"], b[:, None]))
    tables.extend(stats_tables(model.stats, prefix))
    if model.curve is not None:
        tables.append(Table(f"{prefix}curve", list(CURVE_COLUMNS), model.curve, int_columns=1))
    return tables


def _header(models: Sequence[GeanModel]) -> dict:
    first = models[0]
    return {
        "n_joints": int(first.n_joints),
        "dt": float(first.dt),
        "history_length": first.history_length,
        "history_stride": first.history_stride,
        "activation": "tanh",
        "loss_kind": first.loss_kind,
        "rollout_length": int(first.rollout_length),
        "n_members": len(models),
        "member_seeds": [int(m.seed) for m in models],
        "layer_shapes": [list(shape) for shape in first.network.layer_shapes],
    }


def _member_from_tables(path, header: dict, tables: dict, prefix: str, seed: int) -> GeanModel:
    weights, biases = [], []
    for i, shape in enumerate(header["layer_shapes"]):
        try:
            w = tables[f"{prefix}layer{i}.weight"].data
            b = tables[f"{prefix}layer{i}.bias"].data[:, 0]
        except KeyError as exc:
            raise ParseError(path, None, f"missing table {exc.args[0]!r}") from None
        if list(w.shape) != list(shape) or b.shape != (shape[0],):
            raise ParseError(
                path, None, f"{prefix}layer{i} has shape {w.shape}, header says {shape}"
            )
        weights.append(w.copy())
        biases.append(b.copy())
    stats = stats_from_tables(
        path, tables, header["history_length"], header["history_stride"], prefix
    )
    curve = tables.get(f"{prefix}curve")
    try:
        return GeanModel(
            network=Mlp(weights=weights, biases=biases),
            stats=stats,
            dt=header["dt"],
            n_joints=header["n_joints"],
            loss_kind=header["loss_kind"],
            rollout_length=header["rollout_length"],
            seed=seed,
            curve=None if curve is None else curve.data.copy(),
        )
    except ShapeError as exc:
        raise ModelMismatchError(f"{path}: {exc}") from exc


def _read_models(path, kind: str) -> List[GeanModel]:
    header, tables = read_container(
        path,
        kind,
        constants.CHECKPOINT_FORMAT_VERSION,
        schema_path("checkpoint_header_schema.yaml"),
    )
    count = header["n_members"]
    if len(header["member_seeds"]) != count:
        raise ParseError(path, None, f"{len(header['member_seeds'])} seeds for {count} members")
    if kind == constants.MODEL_KIND:
        if count != 1:
            raise ParseError(path, None, f"a model file holds one member, header says {count}")
        return [_member_from_tables(path, header, tables, "", header["member_seeds"][0])]
    return [
        _member_from_tables(path, header, tables, f"member{i}/", header["member_seeds"][i])
        for i in range(count)
    ]


def save_model(model: GeanModel, path) -> None:
    write_container(
        path,
        constants.MODEL_KIND,
        constants.CHECKPOINT_FORMAT_VERSION,
        _header([model]),
        _member_tables(model, ""),
    )


def load_model(path) -> GeanModel:
    return _read_models(path, constants.MODEL_KIND)[0]


def save_ensemble(ensemble: Ensemble, path) -> None:
    tables = []
    for i, member in enumerate(ensemble.members):
        tables.extend(_member_tables(member, f"member{i}/"))
    write_container(
        path,
        constants.ENSEMBLE_KIND,
        constants.CHECKPOINT_FORMAT_VERSION,
        _header(ensemble.members),
        tables,
    )


def load_ensemble(path) -> Ensemble:
    return Ensemble(members=_read_models(path, constants.ENSEMBLE_KIND))
