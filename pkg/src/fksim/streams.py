"""Deterministic RNG stream derivation.

Every stream is a pure function of (master_seed, purpose tag, extra indices),
so results do not depend on execution order or worker count.
"""

from __future__ import annotations

import zlib

import numpy as np


def _tag_int(tag) -> int:
    if isinstance(tag, str):
        return zlib.crc32(tag.encode("utf-8"))
    return int(tag) & 0xFFFFFFFFFFFFFFFF


def substream(master_seed: int, *tags) -> np.random.Generator:
    """An independent generator keyed by the master seed and a tag tuple."""
    entropy = [int(master_seed) & 0xFFFFFFFFFFFFFFFF] + [_tag_int(t) for t in tags]
    return np.random.default_rng(np.random.SeedSequence(entropy))
