"""Seeded pseudo-random generator owned by this package.

Every random draw in the library, the CLI and the test suite flows through
a splitmix64 stream so that results are reproducible from an integer seed
alone, independent of platform or numpy version.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 stream; uniforms take the top 53 bits of each output."""

    def __init__(self, seed: int = 0):
        self._state = int(seed) & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53
        return low + (high - low) * u

    def normal(self) -> float:
        """Standard normal via Box-Muller (cosine branch only)."""
        u1 = self.uniform()
        while u1 <= 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def uniform_array(self, shape, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        out = np.empty(int(np.prod(shape)))
        for i in range(out.size):
            out[i] = self.uniform(low, high)
        return out.reshape(shape)

    def normal_array(self, shape) -> np.ndarray:
        out = np.empty(int(np.prod(shape)))
        for i in range(out.size):
            out[i] = self.normal()
        return out.reshape(shape)


def random_symmetric(rng: SplitMix64, n: int, low: float = -1.0, high: float = 1.0) -> np.ndarray:
    """Symmetric n-by-n matrix: uniform entries, then (M + M.T)/2."""
    m = rng.uniform_array((n, n), low, high)
    return 0.5 * (m + m.T)


def random_psd(rng: SplitMix64, n: int) -> np.ndarray:
    """Random positive semidefinite matrix G @ G.T with Gaussian G."""
    g = rng.normal_array((n, n))
    return g @ g.T


def random_unit_vector(rng: SplitMix64, n: int) -> np.ndarray:
    """Uniform direction on the unit sphere from normalized Gaussian draws."""
    while True:
        v = rng.normal_array((n,))
        nrm = float(np.linalg.norm(v))
        if nrm > 1e-12:
            return v / nrm
