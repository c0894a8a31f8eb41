"""Counter-based seed streams.

Every random draw in the package goes through :func:`make_rng`, which derives
an independent generator from a master seed and a tuple of labels/counters.
Parallel workers therefore never share or reorder a stream.
"""

from __future__ import annotations

import zlib

import numpy as np

MASK64 = (1 << 64) - 1


def _key_part(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part) & MASK64


def seed_sequence(seed: int, *key) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed) & MASK64, spawn_key=tuple(_key_part(k) for k in key))


def make_rng(seed: int, *key) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, *key))


def derive_seed(seed: int, *key) -> int:
    """A 64-bit integer seed for the substream ``(seed, *key)``."""
    state = seed_sequence(seed, *key).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)
