# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

# Example usage of the geansim API: collect, train, replay, reach.

import numpy as np

from geansim import (
    GeanConfig,
    ReacherEnv,
    collect_dataset,
    load_arm_preset,
    load_plant_preset,
    replay_error,
    train_ensemble,
)
from geansim.constants import TEST_SEED_OFFSET
from geansim.reacher_env import random_controller, run_episode

arm = load_arm_preset("desk4")
plant = load_plant_preset("default-messy")

print("\n=== geansim Example Output ===\n")
print(f"Arm {arm.name}: {arm.n_joints} joints, dt {arm.dt} s")
print(f"Plant {plant.name}: hysteresis width {plant.hysteresis_width}\n")

# Small sets so the example finishes in a few minutes
train_set = collect_dataset(plant, arm, 40, seed=0, jobs=2)
test_set = collect_dataset(plant, arm, 10, seed=TEST_SEED_OFFSET, jobs=2)
print(f"Collected {len(train_set)} training and {len(test_set)} test trajectories.")

config = GeanConfig(
    history_length=3, hidden_width=64, epochs=5, loss_kind="position", ensemble_size=3
)
ensemble = train_ensemble(config, arm, train_set, jobs=3)
for i, member in enumerate(ensemble.members):
    print(f"  member {i}: final validation loss {member.curve[-1, 2]:.4g}")

report = replay_error(arm, ensemble, test_set, horizons=(1, 10, 100), bootstrap_resamples=200)
print("\nReplay error (deg):")
for row in report.rows:
    print(
        f"  {row['provider']:>12} h={row['horizon_steps']:<4} "
        f"{row['mean_deg']:.3f} [{row['ci_lo']:.3f}, {row['ci_hi']:.3f}]"
    )

env = ReacherEnv(arm, ensemble)
result = run_episode(env, random_controller, seed=0)
print(
    f"\nRandom reacher episode: return {result.total_reward:.2f}, "
    f"final error {result.final_error_deg:.2f} deg, success {result.success}"
)
print(f"Mean disagreement over the episode: {np.mean([r['r_disag'] for r in result.rows]):.4f}")
