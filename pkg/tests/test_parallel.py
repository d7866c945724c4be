# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Tests for seed spawning and the process pool wrapper."""

import math

import numpy as np

from geansim.parallel import parallel_map, spawn_seeds


def test_spawn_seeds_are_reproducible_and_distinct():
    a = [np.random.default_rng(s).random() for s in spawn_seeds(3, 4)]
    b = [np.random.default_rng(s).random() for s in spawn_seeds(3, 4)]
    assert a == b
    assert len(set(a)) == 4


def test_parallel_map_keeps_order():
    items = list(range(12))
    assert parallel_map(math.factorial, items, jobs=3) == [math.factorial(i) for i in items]


def test_parallel_map_serial_paths():
    assert parallel_map(math.factorial, [5], jobs=4) == [120]
    assert parallel_map(math.factorial, [], jobs=1) == []
