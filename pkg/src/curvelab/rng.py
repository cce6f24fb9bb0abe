"""Portable seedable random numbers.

All randomized experiments draw from :class:`SplitMix64` so that a seed
reproduces the same inputs on any platform.  The generator is the
standard splitmix64 recurrence::

    state <- state + 0x9E3779B97F4A7C15            (mod 2**64)
    z <- state
    z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9       (mod 2**64)
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB       (mod 2**64)
    output z ^ (z >> 31)

Doubles in [0, 1) are ``(output >> 11) * 2**-53``.  Normal deviates use
Box-Muller on consecutive uniform pairs.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


class SplitMix64:
    """Vectorized splitmix64 stream."""

    def __init__(self, seed: int = 0):
        self.state = np.uint64(int(seed) % 2**64)

    def next_uint64(self, size: int) -> np.ndarray:
        steps = np.arange(1, size + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = self.state + steps * _GOLDEN
            self.state = self.state + np.uint64(size) * _GOLDEN
            z = (z ^ (z >> np.uint64(30))) * _MIX1
            z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))

    def uniform(self, low=0.0, high=1.0, size=None):
        n = 1 if size is None else int(np.prod(size))
        u = (self.next_uint64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        out = low + (high - low) * u
        if size is None:
            return float(out[0])
        return out.reshape(size)

    def normal(self, size=None):
        n = 1 if size is None else int(np.prod(size))
        m = (n + 1) // 2
        u1 = self.uniform(size=m)
        u2 = self.uniform(size=m)
        rad = np.sqrt(-2.0 * np.log1p(-u1))
        z = np.concatenate([rad * np.cos(2 * np.pi * u2), rad * np.sin(2 * np.pi * u2)])[:n]
        if size is None:
            return float(z[0])
        return z.reshape(size)

    def integers(self, low: int, high: int, size=None):
        """Integers in ``[low, high)``."""
        n = 1 if size is None else int(np.prod(size))
        span = high - low
        vals = low + np.floor(self.uniform(size=n) * span).astype(np.int64)
        if size is None:
            return int(vals[0])
        return vals.reshape(size)

    def signs(self, size):
        return np.where(self.uniform(size=size) < 0.5, -1, 1).astype(np.int64)

    def spawn(self, key: int) -> "SplitMix64":
        """Independent child stream; ``key`` distinguishes siblings."""
        child = SplitMix64(0)
        with np.errstate(over="ignore"):
            child.state = self.next_uint64(1)[0] ^ np.uint64(key * 0x632BE59BD9B4E019 % 2**64)
        return child
