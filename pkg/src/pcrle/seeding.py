"""Reproducible random streams.

All randomness in the package flows from one 64-bit seed through Philox,
a counter-based generator whose streams can be opened independently per
work unit.  Replication ``i`` of a sweep uses key word ``seed ^ i``, so
replications can run in any order (or concurrently) without changing
results.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    """Root generator for a run."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))


def replication_rng(seed: int, rep: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for replication ``rep``.

    ``stream`` separates contexts that share a replication index (for
    example different sample sizes within one sweep).
    """
    return np.random.Generator(
        np.random.Philox(key=[(seed ^ rep) & _MASK64, stream & _MASK64])
    )
