"""Counter-based random streams keyed by (experiment seed, replication).

Every replication owns an independent Philox stream, so results do not
depend on how replications are split between workers or on their order.
Within a stream draws are taken in a fixed order (local parameter, then
rewards, then action uniforms), which gives every policy the same rewards
for the same seed and replication.
"""

from __future__ import annotations

import numpy as np

from hjbandit.errors import IllegalArgumentError

__all__ = ["MAX_SEED", "replication_stream"]

MAX_SEED = 2**64 - 1


def replication_stream(seed: int, replication: int) -> np.random.Generator:
    if not 0 <= seed <= MAX_SEED:
        raise IllegalArgumentError(f"seed must be a 64-bit unsigned integer: {seed}")
    if not 0 <= replication <= MAX_SEED:
        raise IllegalArgumentError(f"replication index out of range: {replication}")
    key = np.array([replication, seed], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
