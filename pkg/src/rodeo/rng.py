"""Seed derivation.

All randomness hangs off one root seed.  Child seeds are derived by mixing
integer keys (stage, window, grid point, time-set index, ...) into a
``numpy.random.SeedSequence`` spawn key, so every stream is a pure function
of ``(root, keys)`` and independent of evaluation order.
"""

from __future__ import annotations

import numpy as np

SEED_MASK = (1 << 64) - 1


def derive_seed(root: int, *keys: int) -> int:
    """A 64-bit child seed for the key path ``keys`` under ``root``."""
    ss = np.random.SeedSequence(int(root) & SEED_MASK, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def stream(root: int, *keys: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(root) & SEED_MASK, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))
