"""Counter-based, splittable random streams.

A stream is addressed by a root seed and a tuple of nonnegative integers
(replication index, annulus index, ...). Streams are Philox generators keyed
through ``SeedSequence`` spawn keys, so any stream can be reproduced in
isolation without replaying the others.
"""
from __future__ import annotations

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    if seed is None:
        raise ValueError("a seed is required")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
