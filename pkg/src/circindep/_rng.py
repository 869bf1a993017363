"""Seeded random streams.

Every random draw in the package goes through a Philox generator (a
counter-based bit generator) keyed by ``SeedSequence(seed, spawn_key=...)``.
Replicate ``r`` of a simulation, or any other indexed task, gets
``substream(seed, r)``, so results never depend on how work is split across
processes.
"""

from __future__ import annotations

import numpy as np

_MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= _MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def substream(seed: int, *index: int) -> np.random.Generator:
    """Independent generator for task ``index`` under master ``seed``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(i) for i in index))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(seed) -> np.random.Generator:
    """Accept an int seed, an existing Generator, or None (fresh entropy)."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        return np.random.Generator(np.random.Philox())
    return substream(seed)
