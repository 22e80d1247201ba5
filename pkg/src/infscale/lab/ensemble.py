"""Seeded orbit ensembles."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from ..dynamics import SingularHit

THREADS_ENV = "INFSCALE_THREADS"
MAX_ATTEMPTS = 16


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def orbit_rng(master_seed: int, stream: int, orbit_id: int, attempt: int = 0) -> np.random.Generator:
    """Generator fixed by (master seed, experiment stream, orbit, attempt)."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(stream), int(orbit_id), int(attempt)))
    return np.random.default_rng(ss)


def run_ensemble(fn: Callable[[int, np.random.Generator], object], n_orbits: int,
                 master_seed: int, stream: int = 0, threads: int = 1) -> list:
    """Apply ``fn(orbit_id, rng)`` to every orbit; results in orbit order.

    An orbit that lands exactly on a singular point is redrawn from the
    next attempt's seed (a probability-zero event for real dynamics).
    """

    def one(i):
        for attempt in range(MAX_ATTEMPTS):
            try:
                return fn(i, orbit_rng(master_seed, stream, i, attempt))
            except SingularHit:
                continue
        raise RuntimeError(f"orbit {i} hit a singular point {MAX_ATTEMPTS} times in a row "
                           f"(master seed {master_seed}, stream {stream})")

    if threads <= 1:
        return [one(i) for i in range(n_orbits)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(n_orbits)))
