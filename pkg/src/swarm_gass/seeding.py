"""Counter-based seed derivation.

Every random stream in the package is keyed by a tuple of non-negative
integers (master seed, iteration, sample index, purpose, ...). Keys are fed
to :class:`numpy.random.SeedSequence` as ``spawn_key`` so streams are
independent of the order in which they are created, which is what makes
results independent of the parallelism width.
"""

from __future__ import annotations

import numpy as np

# Purpose codes. Appended to keys so two uses of the same counters never
# share a stream.
PERTURB = 1
EPISODE = 2
EVAL = 3
INIT = 4
SPAWN = 10
WIND = 11
CONTROL = 12
WEAPONS = 13


def _entropy(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return seed


def seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(_entropy(seed), spawn_key=tuple(int(k) for k in key))


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return a generator for the stream identified by ``(seed, *key)``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *key)))


def derive_seed(seed: int, *key: int) -> int:
    """Hash ``(seed, *key)`` to a 63-bit integer usable as a fresh seed."""
    state = seed_sequence(seed, *key).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])
