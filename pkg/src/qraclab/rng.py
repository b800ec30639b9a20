"""Deterministic, splittable random streams.

Every stochastic routine in the package derives its generator from an
integer seed plus a small integer path, so independent streams can be
handed out per (x, replicate) pair without coordination.  Philox is
counter-based, which keeps the streams cheap to fork and reproducible
across platforms.
"""

from __future__ import annotations

import numpy as np

# Stream path tags.  Keeping them in one place avoids accidental collisions
# between modules that fork streams from the same user seed.
TAG_SHARED = 0
TAG_ALICE = 1
TAG_BOB = 2
TAG_SAMPLE = 3
TAG_NEWMAN = 4
TAG_BATCH = 5
TAG_CORPUS = 6
TAG_ENCODE = 7


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return a generator for the stream identified by ``(seed, *path)``.

    Distinct paths yield statistically independent streams for the same
    seed; the same (seed, path) always yields the same stream.
    """
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))
