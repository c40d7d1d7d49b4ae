"""splitmix64 pseudo-random generator and a Fisher-Yates shuffle built on it.

The split must reproduce bit-for-bit across languages, so the platform RNG
is never used. splitmix64 (Steele, Lea & Flood 2014; the java.util
.SplittableRandom mixer) is small enough to restate in full:

    state    <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z        <- state
    z        <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   mod 2^64
    z        <- (z XOR (z >> 27)) * 0x94D049BB133111EB   mod 2^64
    output   <- z XOR (z >> 31)

Bounded draws use rejection sampling (no modulo bias); shuffling is the
standard descending Fisher-Yates. Per-stream seeds are derived with
``derive_seed`` below.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """The splitmix64 output mixer (a 64-bit bijection)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Deterministic sub-stream seed for (seed, index), e.g. one per class."""
    return mix64((seed + (index + 1) * GOLDEN) & MASK64)


class SplitMix64:
    """Sequential splitmix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), by rejection (bias-free)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
