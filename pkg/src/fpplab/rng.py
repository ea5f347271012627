"""Seed derivation.  Everything random is a pure function of a 64-bit master seed."""

import hashlib

import numpy as np

from .kernels import splitmix64_np

MASK64 = (1 << 64) - 1


def name_hash(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "little")


def mix64(*parts: int) -> int:
    """Fold integers into one 64-bit seed with splitmix64."""
    h = np.zeros(1, dtype=np.uint64)
    for p in parts:
        h = splitmix64_np(h ^ np.uint64(int(p) & MASK64))
    return int(h[0])


def sample_seed(master_seed: int, experiment: str, index: int) -> int:
    return mix64(master_seed, name_hash(experiment), index)


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))
