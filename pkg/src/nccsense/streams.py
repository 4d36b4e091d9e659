"""Deterministic substream derivation for Monte-Carlo trials.

Every (master seed, purpose, trial index) triple maps to its own
Philox4x64-10 counter-based generator.  The master seed fills the first
64-bit key word; purpose and index pack into the second, so distinct
triples get distinct keys and therefore independent streams.  Results are
reproducible for a given master seed regardless of how trials are split
across worker processes, because each trial derives its streams from the
triple alone.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np

SEED_BITS = 64
INDEX_BITS = 48
PURPOSE_BITS = 16


class StreamPurpose(IntEnum):
    """Disjoint stream families; see the module docstring for the packing."""

    GENERATE = 0
    CALIBRATION_ENV = 1
    CALIBRATION_MEAS = 2
    EVAL_ENV = 3
    EVAL_H0_MEAS = 4
    EVAL_H1_MEAS = 5
    NULL_ENV = 6
    NULL_MEAS = 7


def substream(master_seed: int, purpose: StreamPurpose, index: int = 0) -> np.random.Generator:
    """Generator for trial ``index`` of the given purpose under ``master_seed``."""
    if not 0 <= int(master_seed) < 2**SEED_BITS:
        raise ValueError(f"master_seed must fit in {SEED_BITS} bits, got {master_seed!r}")
    purpose = StreamPurpose(purpose)
    if not 0 <= int(index) < 2**INDEX_BITS:
        raise ValueError(f"trial index must fit in {INDEX_BITS} bits, got {index!r}")
    key = np.array(
        [int(master_seed), (int(purpose) << INDEX_BITS) | int(index)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))
