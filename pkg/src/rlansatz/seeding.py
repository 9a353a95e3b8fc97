"""Counter-based seed derivation.

Every stochastic call in the package takes an explicit integer seed. Seeds
for sub-tasks (per worker, per episode, per objective evaluation, ...) are
derived from a master seed plus an integer path, so a run is reproducible
from its master seed alone and parallel consumers never share RNG state.
"""

from __future__ import annotations

import numpy as np

# Tags used as the last path component to keep streams for different
# purposes disjoint even when the numeric path prefix coincides.
OBS_STREAM = 0
OPT_STREAM = 1
REWARD_STREAM = 2
INIT_STREAM = 3


def derive_seed(master_seed: int, *path: int) -> int:
    """Derive a 63-bit integer seed from a master seed and an integer path.

    Deterministic, and distinct paths give independent streams (backed by
    numpy's SeedSequence entropy mixing).
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(p) for p in path))
    state = ss.generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


def rng_for(master_seed: int, *path: int) -> np.random.Generator:
    """A numpy Generator seeded from ``derive_seed(master_seed, *path)``."""
    return np.random.default_rng(derive_seed(master_seed, *path))
