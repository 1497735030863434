"""Named, order-independent random sub-streams derived from one seed."""

from __future__ import annotations

import secrets
import zlib

import numpy as np


def stage_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def substream(seed: int, stage: str, *keys: int) -> np.random.Generator:
    """Generator for ``(seed, stage, *keys)``; independent of call order."""
    entropy = [int(seed), stage_key(stage), *(int(k) for k in keys)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def fresh_seed() -> int:
    return secrets.randbits(32)
