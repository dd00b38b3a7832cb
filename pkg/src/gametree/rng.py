"""Seed derivation for reproducible, parallel-safe random streams.

Run ``r`` under master seed ``s`` draws from
``numpy.random.default_rng(SeedSequence(s, spawn_key=(r,)))``.  The stream of a
run depends only on ``(s, r)``, so serial and parallel execution agree.
"""

from __future__ import annotations

import numpy as np

SEED_MASK = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed & SEED_MASK))


def run_rng(seed: int, run: int) -> np.random.Generator:
    """Independent generator for run number ``run`` under master ``seed``."""
    if run < 0:
        raise ValueError("run index must be nonnegative")
    return np.random.default_rng(np.random.SeedSequence(seed & SEED_MASK, spawn_key=(run,)))
