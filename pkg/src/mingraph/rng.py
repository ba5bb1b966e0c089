"""Seeded splitmix64 generator used for all sampling.

The state advances by the odd constant 0x9E3779B97F4A7C15 per draw and each
output is the usual xor-shift-multiply finaliser of the state.  Draws are
produced in counter mode, so a batch of n draws equals n single draws.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SplitMix64"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    def __init__(self, seed: int) -> None:
        self.state = int(seed) & _MASK

    def next_u64(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("n must be non-negative")
        with np.errstate(over="ignore"):
            steps = np.arange(1, n + 1, dtype=np.uint64) * _GOLDEN
            out = _mix(np.uint64(self.state) + steps)
        self.state = (self.state + n * int(_GOLDEN)) & _MASK
        return out

    def random(self, n: int) -> np.ndarray:
        """n doubles in [0, 1) from the top 53 bits."""
        return (self.next_u64(n) >> np.uint64(11)).astype(float) * 2.0**-53

    def uniform(self, lo: float, hi: float, n: int | None = None):
        u = self.random(1 if n is None else n)
        v = lo + (hi - lo) * u
        return float(v[0]) if n is None else v

    def sign(self) -> int:
        return 1 if self.random(1)[0] < 0.5 else -1

    def spawn(self, key: int) -> "SplitMix64":
        """Independent child stream derived from this state and ``key``."""
        with np.errstate(over="ignore"):
            s = _mix(np.array([self.state ^ (int(key) & _MASK)], dtype=np.uint64))[0]
        return SplitMix64(int(s))
