"""Seedable, platform-independent random streams.

Every stochastic component draws from a PCG64 generator derived from
(seed, stream id, *indices) through numpy's SeedSequence spawn keys.  A
stream depends only on its derivation path, never on iteration order, so
per-sample work can run in parallel and still reproduce bit-for-bit.
"""
from __future__ import annotations

import numpy as np

# Stream ids, one per stochastic subsystem.
INIT = 0      # parameter initialisation
SHUFFLE = 1   # per-epoch batch order
AUGMENT = 2   # per-(epoch, sample) augmentation draws
DROPOUT = 3   # per-(epoch, step) dropout masks
SYNTH = 4     # synthetic dataset rendering
SEARCH = 5    # hyperparameter search sampling
SPLIT = 6     # dataset split shuffling
MOSAIC = 7    # mosaic split points


def stream(seed: int, stream_id: int, *indices: int) -> np.random.Generator:
    """Return the generator for (seed, stream_id, *indices).

    Identical arguments always yield an identical stream; distinct paths
    yield statistically independent streams.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream_id, *indices))
    return np.random.Generator(np.random.PCG64(ss))
