"""Seeded random number generation with a portable state advance.

All randomness in the package (synthetic data, benchmarks, random
baselines) flows through splitmix64 so that selections are reproducible
across implementations, not just across runs of this one.  The i-th
64-bit output for seed s is mix64(s + i * GAMMA) with the constants
below; see the README for the exact recurrence.
"""

from __future__ import annotations

import numpy as np

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1


class SplitMix64:
    """Scalar splitmix64 stream over Python integers."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_float(self) -> float:
        # 53-bit mantissa in [0, 1)
        return (self.next_u64() >> 11) * 2.0**-53

    def next_below(self, n: int) -> int:
        # floor(u * n / 2^64); bias < n / 2^64 is irrelevant at these sizes
        return (self.next_u64() * n) >> 64

    def sample_without_replacement(self, n: int, m: int) -> list[int]:
        """m distinct indices from [0, n), in draw order (partial Fisher-Yates)."""
        if m > n:
            raise ValueError(f"cannot draw {m} distinct indices from {n}")
        pool = list(range(n))
        out = []
        for t in range(m):
            j = t + self.next_below(n - t)
            pool[t], pool[j] = pool[j], pool[t]
            out.append(pool[t])
        return out


def _mix_stream(seed: int, offset: int, count: int) -> np.ndarray:
    """Vectorized splitmix64 outputs i = offset+1 .. offset+count for one seed.

    Identical to `count` calls of SplitMix64.next_u64 after `offset` calls,
    because the state after i steps is seed + i*GAMMA mod 2^64.
    """
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    z = (np.uint64(seed & _MASK) + idx * np.uint64(_GAMMA)).astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniform_stream(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """count floats in (0, 1], from the splitmix64 stream."""
    bits = _mix_stream(seed, offset, count)
    return ((bits >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def normal_stream(seed: int, count: int) -> np.ndarray:
    """count standard normals via Box-Muller over consecutive uniform pairs."""
    pairs = (count + 1) // 2
    u1 = uniform_stream(seed, pairs, offset=0)
    u2 = uniform_stream(seed, pairs, offset=pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]


def gaussian_matrix(seed: int, rows: int, cols: int) -> np.ndarray:
    return normal_stream(seed, rows * cols).reshape(rows, cols)
