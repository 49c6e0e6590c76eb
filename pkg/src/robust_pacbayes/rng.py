"""Deterministic random streams.

Every stream is a Philox4x64-10 counter-based generator keyed by the pair
``(seed, index)`` with the counter starting at zero. Because the key fully
determines the stream, trial ``i`` of an experiment draws the same numbers
whether trials run serially, in parallel, or in isolation. Non-uniform
variates are produced by numpy's ``Generator`` methods on top of that bit
stream, so exact sequences are tied to the numpy version recorded in
``GENERATOR_VERSION``.
"""

from __future__ import annotations

import numpy as np

__all__ = ["GENERATOR_VERSION", "stream", "composite_index"]

GENERATOR_VERSION = f"philox4x64-10/numpy-{np.__version__}"

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for trial ``index`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.Philox(key=[int(seed) & _MASK64, int(index) & _MASK64]))


def composite_index(cell: int, trial: int) -> int:
    """Pack a (cell, trial) pair into one stream index; cells own disjoint 2**32 blocks."""
    if trial < 0 or trial >= 1 << 32:
        raise ValueError("trial index out of range")
    return (int(cell) << 32) | int(trial)
