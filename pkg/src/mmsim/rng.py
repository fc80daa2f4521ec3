"""Deterministic pseudorandom generator for reproducible runs.

The step selection shuffle is the only source of randomness in the engine,
so the generator must produce the same stream on every platform and every
version of this package.  We use splitmix64 (Steele/Lea/Flood's SplittableRandom
mixer, as published by Vigna), which is tiny enough to carry here verbatim,
plus rejection-sampled bounded integers and a Fisher-Yates shuffle.

The algorithm name is written into every trace header so replays can detect
a generator mismatch instead of silently diverging.
"""

from __future__ import annotations

__all__ = ["RNG_ALGORITHM", "MASK64", "SplitMix64"]

RNG_ALGORITHM = "splitmix64/fisher-yates"

MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """splitmix64 stream seeded with a 64-bit unsigned integer."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ValueError(f"seed must be an int, got {seed!r}")
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) via rejection sampling (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = (MASK64 + 1) - ((MASK64 + 1) % bound)
        while True:
            v = self.next_u64()
            if v < threshold:
                return v % bound

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle, high index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
