"""
backend/seeding.py

Seed split scheme.

Every random draw in the lab comes from a numpy PCG64 generator built
from SeedSequence(master_seed, spawn_key=path). `path` is a tuple of
small non-negative integers naming the consumer, e.g.

    (STREAM_SEESAW, restart)            see-saw restart
    (STREAM_MC_HT, sample)              one Claim ht sample
    (STREAM_INSTANCE, cell, instance)   one random test instance

The derived stream depends only on (master_seed, path), never on the
order in which consumers run, so a fanned-out run reduces to the same
numbers as a sequential one.
"""

from __future__ import annotations

import numpy as np

STREAM_SEESAW = 1
STREAM_OS_SEARCH = 2
STREAM_ETA_SEARCH = 3
STREAM_FAMILY = 4
STREAM_MC_HT = 5
STREAM_MC_JP = 6
STREAM_INSTANCE = 7


def seed_sequence(master_seed: int, *path: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(p) for p in path))


def rng_for(master_seed: int, *path: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(master_seed, *path)))


def derive_seed(master_seed: int, *path: int) -> int:
    """A 63-bit integer seed for consumers that take plain ints."""
    hi, lo = seed_sequence(master_seed, *path).generate_state(2, dtype=np.uint32)
    return (int(hi) << 31) ^ int(lo)
