"""A counter-based SplitMix64 stream.

Draw ``i`` (1-based) of stream ``(seed, stream)`` is

    key  = mix64(mix64(seed) ^ (stream * GAMMA))
    x_i  = mix64(key + i * GAMMA)            (all arithmetic mod 2^64)

with ``mix64`` the SplitMix64 finaliser.  Uniforms take the top 53 bits,
``(x >> 11) * 2^-53``; normals use Box-Muller on consecutive uniform pairs.
Only integer arithmetic decides the bits, so streams agree across platforms
and languages (the normals up to the host's ``log``/``cos``).
"""

from __future__ import annotations

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def mix64(z):
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


class CounterRNG:
    def __init__(self, seed: int, stream: int = 0):
        if seed < 0 or stream < 0:
            raise ValueError("seed and stream must be nonnegative")
        with np.errstate(over="ignore"):
            s = mix64(np.uint64(seed % 2**64))
            self.key = mix64(s ^ (np.uint64(stream % 2**64) * GAMMA))
        self.counter = 0

    def uint64(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            return mix64(self.key + idx * GAMMA)

    def uniform(self, n: int = 1, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        u = (self.uint64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return low + (high - low) * u

    def normal(self, n: int = 1) -> np.ndarray:
        m = (n + 1) // 2
        u = self.uniform(2 * m)
        u1, u2 = 1.0 - u[:m], u[m:]  # u1 in (0, 1]
        r = np.sqrt(-2.0 * np.log(u1))
        return np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])[:n]

    def integers(self, low: int, high: int, n: int = 1) -> np.ndarray:
        """Integers in ``[low, high)`` by scaling a uniform (bias below 2^-40 for small spans)."""
        if high <= low:
            raise ValueError("empty integer range")
        return low + np.floor(self.uniform(n) * (high - low)).astype(np.int64)
