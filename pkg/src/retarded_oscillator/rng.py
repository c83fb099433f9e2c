"""SplitMix64 streams keyed by (seed, cell indices).

Every sweep or basin cell derives its own stream from the run seed and its
grid indices, so any single cell can be regenerated in isolation.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def cell_seed(seed: int, *indices: int) -> int:
    h = mix64(seed)
    for i in indices:
        h = mix64((h + _GAMMA) ^ (i & _MASK))
    return h


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return mix64(self.state)

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()


# history box used throughout the sweeps
A_RANGE = (0.0, 3.0)
OMEGA_RANGE = (-math.pi, math.pi)
PHI_RANGE = (0.0, math.pi)


def draw_history(seed: int, *indices: int):
    """Return (A, omega, phi) drawn uniformly from the history box."""
    g = SplitMix64(cell_seed(seed, *indices))
    return g.uniform(*A_RANGE), g.uniform(*OMEGA_RANGE), g.uniform(*PHI_RANGE)
