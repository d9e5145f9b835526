"""64-bit mixing primitives shared by the keyed-state family and seed derivation.

The finalizer is the SplitMix64 permutation; it is public, dependency-free,
and bit-exact across platforms.  No security claim is attached to it.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """Apply the SplitMix64 finalizer to a 64-bit integer."""
    z &= MASK64
    z ^= z >> 33
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 29
    z = (z * 0x94D049BB133111EB) & MASK64
    z ^= z >> 32
    return z


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mix64` over a uint64 array."""
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(33)
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(29)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(32)
    return z


def fold_tag(tag: int | str) -> int:
    """Reduce an integer or string tag to a 64-bit value."""
    if isinstance(tag, str):
        acc = mix64(len(tag))
        for chunk in tag.encode("utf-8"):
            acc = mix64(acc ^ chunk)
        return acc
    return tag & MASK64


def derive(seed: int, *tags: int | str) -> int:
    """Derive an independent 64-bit seed by folding tags into ``seed``.

    Each tag is multiplied by the golden-ratio constant before mixing, so
    nearby tags land in unrelated streams.
    """
    out = seed & MASK64
    for tag in tags:
        out = mix64(out ^ ((fold_tag(tag) * GOLDEN64) & MASK64))
    return out
