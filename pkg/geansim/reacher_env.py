# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Goal-reaching environment simulated with a GeAN ensemble in the loop.

The agent acts at 100 Hz on a 500 Hz simulator: every agent step changes the
command by at most delta_u_max and then runs action_repeat simulator steps,
each with torques from a uniformly sampled ensemble member.
"""

import json
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from . import constants, dynamics
from .errors import EpisodeDoneError, InputRangeError, ModelMismatchError
from .gean import Ensemble
from .models import ArmModel, EnvConfig

logger = logging.getLogger(__name__)

# Raw actions passed through tanh; this range saturates it to within 0.5 %.
RANDOM_ACTION_SCALE = 3.0


def reward_terms(
    q: np.ndarray,
    goal: np.ndarray,
    action: np.ndarray,
    disagreement_stds: np.ndarray,
    q_limits: np.ndarray,
    config: EnvConfig,
) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
    """Weighted reward and its unweighted components; leading batch axes are allowed.

    action is the squashed command change in control units.
    """
    q = np.asarray(q, dtype=np.float64)
    r_dist = -np.linalg.norm(q - goal, axis=-1)
    r_act = -np.sum(np.square(action), axis=-1)
    r_disag = -np.sum(disagreement_stds, axis=-1)
    center = (q_limits[:, 0] + q_limits[:, 1]) / 2.0
    half_range = (q_limits[:, 1] - q_limits[:, 0]) / 2.0
    margin = config.limit_margin
    if margin > 0:
        excess = (np.abs(q - center) - (half_range - margin)) / margin
        r_lim = -np.sum(np.maximum(0.0, excess), axis=-1)
    else:
        r_lim = np.zeros_like(r_dist)
    total = r_dist + config.c_act * r_act + config.c_disag * r_disag + config.c_lim * r_lim
    return total, {"r_dist": r_dist, "r_act": r_act, "r_disag": r_disag, "r_lim": r_lim}


def success(
    final_q, goal, threshold_deg: float = constants.SUCCESS_THRESHOLD_DEG
) -> bool:
    """Mean absolute joint error strictly below the threshold."""
    error = np.mean(np.abs(np.asarray(final_q, dtype=np.float64) - goal))
    return bool(error < np.deg2rad(threshold_deg))


def final_error_deg(final_q, goal) -> float:
    return float(np.rad2deg(np.mean(np.abs(np.asarray(final_q) - goal))))


@dataclass
class EnvState:
    """Everything the environment carries between agent steps."""

    q: np.ndarray
    qdot: np.ndarray
    u: np.ndarray
    u_prev: np.ndarray
    goal: np.ndarray
    q_hist: np.ndarray
    u_hist: np.ndarray
    step: int = 0

    def copy(self) -> "EnvState":
        return EnvState(
            q=self.q.copy(),
            qdot=self.qdot.copy(),
            u=self.u.copy(),
            u_prev=self.u_prev.copy(),
            goal=self.goal.copy(),
            q_hist=self.q_hist.copy(),
            u_hist=self.u_hist.copy(),
            step=self.step,
        )


def _advance(
    arm: ArmModel,
    ensemble: Ensemble,
    q_hist: np.ndarray,
    u_hist: np.ndarray,
    qdot: np.ndarray,
    u: np.ndarray,
    pick: Optional[int],
):
    """One simulator step for (possibly batched) histories under command u.

    pick is the index of the member to use; None uses the member mean.
    Returns (q_hist', u_hist', qdot', disagreement).
    """
    u_hist = u_hist.copy()
    u_hist[..., -1, :] = u
    predictions = ensemble.predict_all(q_hist, u_hist)
    if pick is None:
        tau = predictions.mean(axis=0)
    else:
        tau = predictions[pick]
    q_next, qdot_next = dynamics.step_arrays(arm, q_hist[..., -1, :], qdot, tau)
    q_next, qdot_next = dynamics.enforce_joint_limits(arm, q_next, qdot_next)
    q_hist = np.concatenate([q_hist[..., 1:, :], q_next[..., None, :]], axis=-2)
    u_hist = np.concatenate([u_hist[..., 1:, :], u_hist[..., -1:, :]], axis=-2)
    return q_hist, u_hist, qdot_next, predictions.std(axis=0)


class ReacherEnv(gym.Env):
    """Reach a random goal configuration; observation (q, qdot, u_prev, goal)."""

    metadata = {"render_modes": []}

    def __init__(self, arm: ArmModel, ensemble: Ensemble, config: Optional[EnvConfig] = None):
        config = EnvConfig() if config is None else config
        ensemble.check_arm(arm)
        if config.n_joints != arm.n_joints:
            raise ModelMismatchError(
                f"environment settings are for {config.n_joints} joints, arm has {arm.n_joints}"
            )
        self.arm = arm
        self.ensemble = ensemble
        self.config = config
        n = arm.n_joints
        self.max_steps = config.agent_steps(arm.dt)
        self.action_space = spaces.Box(-np.inf, np.inf, shape=(n,), dtype=np.float64)
        self.observation_space = spaces.Box(-np.inf, np.inf, shape=(4 * n,), dtype=np.float64)
        self.state: Optional[EnvState] = None

    @property
    def done(self) -> bool:
        return self.state is None or self.state.step >= self.max_steps

    def _observation(self) -> np.ndarray:
        s = self.state
        return np.concatenate([s.q, s.qdot, s.u_prev, s.goal])

    def reset(self, *, seed: Optional[int] = None, options: Optional[dict] = None):
        """Settle at the intermediate pose under a random u_init, then draw a goal."""
        super().reset(seed=seed)
        rng = self.np_random
        cfg = self.config
        n = self.arm.n_joints
        window = self.ensemble.window
        u_init = rng.uniform(cfg.u_init_bounds[:, 0], cfg.u_init_bounds[:, 1])
        q_hist = np.tile(cfg.reset_pose, (window + 1, 1))
        ramp_steps = int(round(cfg.reset_ramp_seconds / self.arm.dt))
        first = np.zeros(n) if ramp_steps else u_init
        u_hist = np.tile(first, (window + 1, 1))
        qdot = np.zeros(n)
        for k in range(ramp_steps + cfg.settle_steps):
            u = u_init * min(1.0, (k + 1) / ramp_steps) if k < ramp_steps else u_init
            pick = int(rng.integers(len(self.ensemble)))
            q_hist, u_hist, qdot, _ = _advance(
                self.arm, self.ensemble, q_hist, u_hist, qdot, u, pick
            )
        goal = rng.uniform(cfg.goal_bounds[:, 0], cfg.goal_bounds[:, 1])
        self.state = EnvState(
            q=q_hist[-1].copy(),
            qdot=qdot,
            u=u_init.copy(),
            u_prev=u_init.copy(),
            goal=goal,
            q_hist=q_hist,
            u_hist=u_hist,
        )
        return self._observation(), {"goal": goal.copy(), "u_init": u_init.copy()}

    def squash(self, action) -> np.ndarray:
        return self.config.delta_u_max * np.tanh(np.asarray(action, dtype=np.float64))

    def step(self, action):
        if self.state is None:
            raise EpisodeDoneError("step() called before reset()")
        if self.done:
            raise EpisodeDoneError(
                f"episode finished after {self.max_steps} steps; call reset()"
            )
        cfg = self.config
        s = self.state
        delta_u = self.squash(action)
        lo, hi = cfg.command_range
        u = np.clip(s.u + delta_u, lo, hi)
        q_hist, u_hist, qdot = s.q_hist, s.u_hist, s.qdot
        stds = []
        for _ in range(cfg.action_repeat):
            pick = int(self.np_random.integers(len(self.ensemble)))
            q_hist, u_hist, qdot, std = _advance(
                self.arm, self.ensemble, q_hist, u_hist, qdot, u, pick
            )
            stds.append(std)
        sigma = np.mean(stds, axis=0)
        s.u_prev = u.copy()
        s.u = u
        s.q_hist, s.u_hist, s.qdot = q_hist, u_hist, qdot
        s.q = q_hist[-1].copy()
        s.step += 1
        reward, components = reward_terms(s.q, s.goal, delta_u, sigma, cfg.q_limits, cfg)
        truncated = s.step >= self.max_steps
        info = {key: float(value) for key, value in components.items()}
        info.update({"disagreement": sigma, "delta_u": delta_u, "step": s.step})
        return self._observation(), float(reward), False, truncated, info


Controller = Callable[[ReacherEnv, np.random.Generator], np.ndarray]


def zero_controller(env: ReacherEnv, rng: np.random.Generator) -> np.ndarray:
    return np.zeros(env.arm.n_joints)


def random_controller(env: ReacherEnv, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-RANDOM_ACTION_SCALE, RANDOM_ACTION_SCALE, size=env.arm.n_joints)


def shooting_controller(
    env: ReacherEnv,
    ensemble: Ensemble,
    horizon: int,
    n_candidates: int,
    rng: np.random.Generator,
    include_zero: bool = False,
) -> np.ndarray:
    """Random shooting: return the first action of the best of n_candidates sequences.

    Candidates are rolled out together with the ensemble-mean torque; the
    score is the summed reward over horizon agent steps.
    """
    if horizon < 1 or n_candidates < 1:
        raise InputRangeError(
            f"horizon and n_candidates must be >= 1, got {horizon}, {n_candidates}"
        )
    cfg = env.config
    s = env.state
    n = env.arm.n_joints
    actions = rng.uniform(
        -RANDOM_ACTION_SCALE, RANDOM_ACTION_SCALE, size=(n_candidates, horizon, n)
    )
    if include_zero:
        actions[0] = 0.0
    q_hist = np.broadcast_to(s.q_hist, (n_candidates, *s.q_hist.shape)).copy()
    u_hist = np.broadcast_to(s.u_hist, (n_candidates, *s.u_hist.shape)).copy()
    qdot = np.broadcast_to(s.qdot, (n_candidates, n)).copy()
    u = np.broadcast_to(s.u, (n_candidates, n)).copy()
    lo, hi = cfg.command_range
    score = np.zeros(n_candidates)
    for h in range(horizon):
        delta_u = env.squash(actions[:, h])
        u = np.clip(u + delta_u, lo, hi)
        stds = []
        for _ in range(cfg.action_repeat):
            q_hist, u_hist, qdot, std = _advance(env.arm, ensemble, q_hist, u_hist, qdot, u, None)
            stds.append(std)
        reward, _ = reward_terms(
            q_hist[:, -1], s.goal, delta_u, np.mean(stds, axis=0), cfg.q_limits, cfg
        )
        score += reward
    return actions[int(np.argmax(score)), 0].copy()


def make_shooting(
    ensemble: Ensemble, horizon: int = 5, n_candidates: int = 64, include_zero: bool = True
) -> Controller:
    def controller(env: ReacherEnv, rng: np.random.Generator) -> np.ndarray:
        return shooting_controller(env, ensemble, horizon, n_candidates, rng, include_zero)

    return controller


def episode_columns(n: int) -> List[str]:
    def block(name):
        return [f"{name}{j}" for j in range(n)]

    return (
        ["agent_step", "t"]
        + block("q")
        + block("qdot")
        + block("u")
        + block("action")
        + ["reward", "r_dist", "r_act", "r_disag", "r_lim"]
        + block("disagreement")
    )


@dataclass
class EpisodeResult:
    rows: List[dict]
    success: bool
    final_error_deg: float
    total_reward: float
    seed: int

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "success": self.success,
            "final_error_deg": self.final_error_deg,
            "return": self.total_reward,
            "transitions": len(self.rows),
        }


def run_episode(env: ReacherEnv, controller: Controller, seed: int) -> EpisodeResult:
    """Reset with seed, act until truncation and log every agent step."""
    env.reset(seed=seed)
    rng = np.random.default_rng(seed)
    n = env.arm.n_joints
    agent_dt = env.arm.dt * env.config.action_repeat
    rows = []
    total = 0.0
    truncated = False
    while not truncated:
        action = controller(env, rng)
        _, reward, _, truncated, info = env.step(action)
        s = env.state
        row = {"agent_step": s.step, "t": s.step * agent_dt}
        for name, values in (
            ("q", s.q),
            ("qdot", s.qdot),
            ("u", s.u),
            ("action", info["delta_u"]),
            ("disagreement", info["disagreement"]),
        ):
            row.update({f"{name}{j}": float(values[j]) for j in range(n)})
        row["reward"] = reward
        row.update({k: info[k] for k in ("r_dist", "r_act", "r_disag", "r_lim")})
        rows.append(row)
        total += reward
    final_q, goal = env.state.q, env.state.goal
    return EpisodeResult(
        rows=rows,
        success=success(final_q, goal),
        final_error_deg=final_error_deg(final_q, goal),
        total_reward=total,
        seed=seed,
    )


def summarize(results: List[EpisodeResult]) -> dict:
    return {
        "episodes": len(results),
        "success_rate": float(np.mean([r.success for r in results])) if results else 0.0,
        "median_final_error_deg": (
            float(np.median([r.final_error_deg for r in results])) if results else 0.0
        ),
        "per_episode": [r.summary() for r in results],
    }


def write_summary(path, summary: dict) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
