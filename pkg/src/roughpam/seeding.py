"""Counter-based, splittable random streams.

Every stochastic routine takes a 64-bit seed plus a structured key and
builds its own Philox generator.  Philox is counter-based, so streams
derived from distinct spawn keys are disjoint and reproducible no matter
how work is scheduled across workers.
"""

from __future__ import annotations

import numpy as np

# Domain tags keep streams of different subsystems disjoint even when they
# share the same user seed and batch index.
DOMAIN_NOISE = 1
DOMAIN_SOLVER = 2
DOMAIN_FK = 3
DOMAIN_LAB = 4
DOMAIN_SELFTEST = 5


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Return a Philox generator for stream ``(seed, *key)``.

    Identical ``(seed, key)`` pairs always produce identical streams;
    distinct keys produce statistically independent streams.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
