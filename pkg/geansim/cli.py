# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Command-line driver: geansim {gen-data,train,eval,ablate,env-run} CONFIG ...

Every command prints the seed it resolved and writes ``<output>.manifest.json``
next to its main output. Errors are reported as ``error [category]: message``
with an exit code per category; usage errors exit with 2.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np

from . import __version__, constants
from .config_loader import RunConfig, load_run_config
from .datagen import collect_dataset, load_dataset, save_dataset
from .errors import GeansimError, ModelMismatchError
from .evalharness import (
    ablate_dataset_size,
    ablate_history,
    ablate_loss,
    ablate_rollout_length,
    replay_error,
    write_rows,
)
from .gean import CURVE_COLUMNS, curve_rows, load_ensemble, load_model, save_ensemble, save_model
from .gean import train as train_model
from .gean import train_ensemble
from .models import Dataset
from .reacher_env import (
    ReacherEnv,
    episode_columns,
    make_shooting,
    random_controller,
    run_episode,
    summarize,
    write_summary,
    zero_controller,
)

logger = logging.getLogger(__name__)

EXIT_CODES = {
    "config": 3,
    "parse": 4,
    "format-version": 4,
    "model-mismatch": 5,
    "numerical": 6,
    "rollout-diverged": 6,
    "training-diverged": 6,
}

AXES = ("dataset-size", "history", "stride", "rollout-length", "loss")


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    else:
        level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def _output(cfg: RunConfig, value: Optional[str], default: str) -> str:
    path = value if value else os.path.join(cfg.out_dir, default)
    _ensure_parent(path)
    return path


def write_manifest(output: str, command: str, cfg: RunConfig, seed, extra=None) -> str:
    """Record config hash, seed and tool version beside an output file or directory."""
    base = output.rstrip(os.sep)
    path = os.path.join(base, "manifest.json") if os.path.isdir(base) else f"{base}.manifest.json"
    manifest = {
        "command": command,
        "config": cfg.source,
        "config_sha256": cfg.digest,
        "seed": seed,
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    manifest.update(extra or {})
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _announce_seed(seed) -> None:
    print(f"seed: {seed}")


def _check_dataset(cfg: RunConfig, dataset: Dataset, path: str) -> None:
    if dataset.arm.n_joints != cfg.arm.n_joints or not np.isclose(dataset.arm.dt, cfg.arm.dt):
        raise ModelMismatchError(
            f"{path}: recorded for {dataset.arm.n_joints} joints at dt {dataset.arm.dt}, "
            f"configuration has {cfg.arm.n_joints} joints at dt {cfg.arm.dt}"
        )


def _load_data(cfg: RunConfig, path: str) -> Dataset:
    dataset = load_dataset(path)
    _check_dataset(cfg, dataset, path)
    return dataset


def _collect_kwargs(cfg: RunConfig) -> dict:
    # Data collection starts every trajectory with the environment's reset protocol.
    return {**cfg.data.collect_kwargs(), "reset": cfg.env}


def cmd_gen_data(cfg: RunConfig, args) -> str:
    n_traj = cfg.data.n_test_traj if args.test else cfg.data.n_traj
    seed = cfg.data.seed + (constants.TEST_SEED_OFFSET if args.test else 0)
    if args.seed is not None:
        seed = args.seed
    _announce_seed(seed)
    out = _output(cfg, args.out, "test.gsd" if args.test else "dataset.gsd")
    dataset = collect_dataset(
        cfg.plant, cfg.arm, n_traj, seed=seed, jobs=args.jobs, **_collect_kwargs(cfg)
    )
    save_dataset(dataset, out)
    logger.info("%s: %d trajectories, %d samples", out, len(dataset), dataset.n_samples)
    write_manifest(out, "gen-data", cfg, seed, {"n_traj": n_traj})
    return out


def cmd_train(cfg: RunConfig, args) -> str:
    gean = cfg.gean
    if args.loss:
        gean = replace(gean, loss_kind=args.loss)
    if args.seed is not None:
        gean = replace(gean, seed=args.seed)
    _announce_seed(gean.seed)
    dataset = _load_data(cfg, args.data)
    out = _output(cfg, args.out, f"gean-{gean.loss_kind}.gck")
    curve_path = f"{os.path.splitext(out)[0]}.curve.csv"
    if gean.ensemble_size > 1:
        ensemble = train_ensemble(gean, cfg.arm, dataset, jobs=args.jobs)
        save_ensemble(ensemble, out)
        rows = [
            {"member": i, **row}
            for i, member in enumerate(ensemble.members)
            for row in curve_rows(member)
        ]
        write_rows(curve_path, ["member", *CURVE_COLUMNS], rows)
    else:
        model = train_model(gean, cfg.arm, dataset)
        save_model(model, out)
        write_rows(curve_path, CURVE_COLUMNS, curve_rows(model))
    write_manifest(out, "train", cfg, gean.seed, {"loss_kind": gean.loss_kind})
    return out


def cmd_eval(cfg: RunConfig, args) -> str:
    seed = cfg.eval.seed if args.seed is None else args.seed
    _announce_seed(seed)
    provider = load_ensemble(args.ensemble) if args.ensemble else load_model(args.model)
    test_set = _load_data(cfg, args.test_data)
    out = _output(cfg, args.out, "replay.csv")
    report = replay_error(
        cfg.arm,
        provider,
        test_set,
        cfg.eval.horizons,
        cfg.eval.bootstrap_resamples,
        seed=seed,
        jobs=args.jobs,
    )
    report.write_csv(out)
    stem = os.path.splitext(out)[0]
    if args.per_trajectory:
        report.write_trajectory_csv(f"{stem}.trajectories.csv")
    if args.plot or cfg.eval.plot:
        from .plotting import plot_report

        plot_report(out, f"{stem}.svg")
    write_manifest(out, "eval", cfg, seed)
    return out


def _ablation_sets(cfg: RunConfig, args):
    dataset = _load_data(cfg, args.data) if args.data else None
    test_set = _load_data(cfg, args.test_data) if args.test_data else None
    return dataset, test_set


def _require(value, flag: str, parser: argparse.ArgumentParser, axis: str):
    if value is None:
        parser.error(f"--axis {axis} requires {flag}")
    return value


def cmd_ablate(cfg: RunConfig, args, parser: argparse.ArgumentParser) -> str:
    seeds = list(cfg.eval.seeds) if args.seed is None else [args.seed]
    _announce_seed(seeds)
    axis = args.axis
    if axis != "dataset-size":
        _require(args.data, "--data", parser, axis)
        _require(args.test_data, "--test-data", parser, axis)
    dataset, test_set = _ablation_sets(cfg, args)
    common = {
        "horizons": cfg.eval.horizons,
        "bootstrap_resamples": cfg.eval.bootstrap_resamples,
    }
    if axis == "dataset-size":
        table = ablate_dataset_size(
            cfg.eval.dataset_sizes,
            seeds,
            cfg.gean,
            cfg.plant,
            cfg.arm,
            test_set=test_set,
            n_test=cfg.data.n_test_traj,
            data_kwargs=_collect_kwargs(cfg),
            jobs=args.jobs,
            **common,
        )
        parameter = "dataset_size"
    elif axis in ("history", "stride"):
        lengths = cfg.eval.history_lengths if axis == "history" else [cfg.gean.history_length]
        strides = cfg.eval.history_strides if axis == "stride" else [cfg.gean.history_stride]
        table = ablate_history(
            lengths, strides, cfg.gean, dataset, cfg.arm, test_set, seeds=seeds, **common
        )
        parameter = "history_length" if axis == "history" else "history_stride"
    elif axis == "rollout-length":
        table = ablate_rollout_length(
            cfg.eval.rollout_lengths, cfg.gean, dataset, cfg.arm, test_set, seeds=seeds, **common
        )
        parameter = "rollout_length"
    else:
        table = ablate_loss(cfg.gean, dataset, cfg.arm, test_set, seeds=seeds, **common)
        parameter = "loss_kind"
    out = _output(cfg, args.out, f"ablate-{axis}.csv")
    table.write_csv(out)
    if args.plot or cfg.eval.plot:
        from .plotting import plot_ablation

        plot_ablation(
            out, f"{os.path.splitext(out)[0]}.svg", parameter, max(cfg.eval.horizons), "gean"
        )
    write_manifest(out, "ablate", cfg, seeds, {"axis": axis})
    return out


def _controller(name: str, cfg: RunConfig, ensemble):
    if name == "shooting":
        return make_shooting(ensemble, cfg.plan.planning_horizon, cfg.plan.n_candidates)
    if name == "random":
        return random_controller
    return zero_controller


def cmd_env_run(cfg: RunConfig, args) -> str:
    seed = cfg.plan.seed if args.seed is None else args.seed
    _announce_seed(seed)
    ensemble = load_ensemble(args.ensemble)
    env = ReacherEnv(cfg.arm, ensemble, cfg.env)
    controller = _controller(args.controller, cfg, ensemble)
    out_dir = args.out if args.out else os.path.join(cfg.out_dir, f"env-{args.controller}")
    os.makedirs(out_dir, exist_ok=True)
    columns = episode_columns(cfg.arm.n_joints)
    results = []
    for i in range(args.episodes):
        result = run_episode(env, controller, seed + i)
        write_rows(os.path.join(out_dir, f"episode{i:03d}.csv"), columns, result.rows)
        results.append(result)
        logger.info(
            "episode %d: final error %.3f deg, success %s",
            i,
            result.final_error_deg,
            result.success,
        )
    summary = summarize(results)
    write_summary(os.path.join(out_dir, "summary.json"), summary)
    print(
        f"success rate {summary['success_rate']:.3f}, "
        f"median final error {summary['median_final_error_deg']:.3f} deg"
    )
    write_manifest(out_dir, "env-run", cfg, seed, {"controller": args.controller})
    return out_dir


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geansim", description="GeAN sim-to-real experiments on a planar arm."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="run configuration YAML")
    common.add_argument("--out", help="output path (defaults under io.out_dir)")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-data", parents=[common], help="collect exploration trajectories")
    gen.add_argument("--test", action="store_true", help="collect the held-out test set")

    train = sub.add_parser("train", parents=[common], help="train a GeAN or an ensemble")
    train.add_argument("--data", required=True)
    train.add_argument("--loss", choices=("torque", "position", "multistep"))

    ev = sub.add_parser("eval", parents=[common], help="replay error on held-out data")
    which = ev.add_mutually_exclusive_group(required=True)
    which.add_argument("--model")
    which.add_argument("--ensemble")
    ev.add_argument("--test-data", required=True)
    ev.add_argument("--per-trajectory", action="store_true")
    ev.add_argument("--plot", action="store_true")

    ab = sub.add_parser("ablate", parents=[common], help="sweep one experimental axis")
    ab.add_argument("--axis", choices=AXES, required=True)
    ab.add_argument("--data")
    ab.add_argument("--test-data")
    ab.add_argument("--plot", action="store_true")

    env = sub.add_parser("env-run", parents=[common], help="run reacher episodes")
    env.add_argument("--ensemble", required=True)
    env.add_argument("--episodes", type=int, default=10)
    env.add_argument("--controller", choices=("shooting", "random", "zero"), default="shooting")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    if args.command == "env-run" and args.episodes < 1:
        parser.error("--episodes must be >= 1")
    try:
        cfg = load_run_config(args.config)
        if args.command == "gen-data":
            cmd_gen_data(cfg, args)
        elif args.command == "train":
            cmd_train(cfg, args)
        elif args.command == "eval":
            cmd_eval(cfg, args)
        elif args.command == "ablate":
            cmd_ablate(cfg, args, parser)
        else:
            cmd_env_run(cfg, args)
    except GeansimError as exc:
        print(f"error [{exc.category}]: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return 1
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
