"""
Portable, seed-reproducible random numbers for synthetic fixtures.

The stream is SplitMix64 (Steele, Lea & Flood 2014) in counter form, so any
language with wrapping 64-bit unsigned arithmetic reproduces it bit for bit:

    state_k = seed + k * 0x9E3779B97F4A7C15          (mod 2**64), k = 1, 2, ...
    z = state_k
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9        (mod 2**64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB        (mod 2**64)
    out_k = z ^ (z >> 31)

Uniforms are ``(out >> 11) * 2**-53`` in [0, 1). A standard normal consumes
two consecutive outputs (u1, u2) and uses the cosine branch of Box-Muller:

    z = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Counter-based SplitMix64 stream. ``seed`` is any integer, taken mod 2**64."""

    def __init__(self, seed: int):
        self._seed = np.uint64(int(seed) & _MASK64)
        self._counter = 0

    def next_u64(self, n: int) -> np.ndarray:
        k = np.arange(self._counter + 1, self._counter + n + 1, dtype=np.uint64)
        self._counter += n
        with np.errstate(over="ignore"):
            z = self._seed + k * _GAMMA
            z = (z ^ (z >> np.uint64(30))) * _M1
            z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))

    def uniform(self, n: int) -> np.ndarray:
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, n: int) -> np.ndarray:
        u = self.uniform(2 * n)
        u1, u2 = u[0::2], u[1::2]
        return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
