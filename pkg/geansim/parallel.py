# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Process-level fan-out for independent work items (trajectories, members, replays)."""

import logging
from multiprocessing import Pool
from typing import Callable, List, Sequence, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def spawn_seeds(seed: int, count: int) -> List[np.random.SeedSequence]:
    """Independent child seed sequences, one per work item, derived from a single seed."""
    return np.random.SeedSequence(seed).spawn(count)


def parallel_map(func: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> List[R]:
    """Map func over items, in order, using up to jobs worker processes.

    Results do not depend on jobs: each item carries everything it needs
    (including its own seed) and results come back in input order.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    workers = min(jobs, len(items))
    logger.debug("mapping %d items over %d processes", len(items), workers)
    with Pool(processes=workers) as pool:
        return pool.map(func, items)
