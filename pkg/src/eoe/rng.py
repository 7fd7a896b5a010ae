"""Counter-based random streams: replication r's stream is a pure function of
(seed, r), so batches shard identically for any worker count."""

from __future__ import annotations

import numpy as np


def replication_stream(seed: int, rep: int) -> np.random.Philox:
    """Philox stream keyed by (seed, rep); independent across keys."""
    if seed < 0 or rep < 0:
        raise ValueError("seed and rep must be non-negative")
    return np.random.Philox(key=np.array([seed, rep], dtype=np.uint64))


def tail_stream(seed: int, rep: int) -> np.random.Philox:
    """Secondary stream for end-of-replication draws (e.g. aggregated jump
    counts), independent of how much of the main stream was consumed."""
    return replication_stream(seed, rep).jumped(1)
