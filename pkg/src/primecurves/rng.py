"""Seed derivation and generator construction.

Every random draw in the package comes from a ``numpy.random.Generator``
backed by PCG64, seeded with a 64-bit integer. Realization seeds are derived
by a splitmix64 mix of ``(base_seed, kind tag, index)``, so a realization's
stream depends only on those three values and never on execution order.
"""

from __future__ import annotations

import zlib

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 output step applied to ``x`` (the finalizer plus increment)."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def kind_tag(name: str) -> int:
    """Stable 64-bit tag for a model kind name."""
    return splitmix64(zlib.crc32(name.encode("utf-8")))


def derive_seed(base_seed: int, tag: int | str, index: int) -> int:
    if isinstance(tag, str):
        tag = kind_tag(tag)
    base_seed, index = int(base_seed), int(index)
    if not 0 <= base_seed <= MASK64:
        raise ValueError(f"base_seed must be a 64-bit unsigned integer, got {base_seed}")
    if index < 0:
        raise ValueError(f"realization index must be >= 0, got {index}")
    return splitmix64(splitmix64(base_seed ^ tag) ^ (index & MASK64))


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))
