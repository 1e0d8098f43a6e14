"""Seed derivation shared by every randomized component.

``derive_seed(master, *coords)`` feeds ``[master, *coords]`` to
:class:`numpy.random.SeedSequence` and returns the first 64-bit word of its
generated state. Changing this function changes every reproducible output.
"""

import secrets

import numpy as np

SEED_MAX = 2**63 - 1


def derive_seed(master: int, *coords: int) -> int:
    entropy = [int(master)] + [int(c) for c in coords]
    if any(x < 0 for x in entropy):
        raise ValueError("seeds and coordinates must be non-negative")
    word = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0]
    return int(word) & SEED_MAX


def fresh_seed() -> int:
    return secrets.randbelow(SEED_MAX)
