"""Portable deterministic PRNG (splitmix64) for reproducible sampling.

The algorithm is fixed so that identical seeds select identical exemplars
and drop identical sentences regardless of Python version or platform.
"""
from __future__ import annotations

from typing import Sequence, TypeVar

_MASK64 = (1 << 64) - 1

T = TypeVar("T")


class SplitMix64:
    """Sebastiano Vigna's splitmix64; 64-bit state, 64-bit output."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). Modulo bias is < n/2**64."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) / float(1 << 53)


def sample_indices(n: int, k: int, rng: SplitMix64) -> list[int]:
    """k distinct indices from range(n), uniform without replacement.

    Partial Fisher-Yates: the first k slots of a virtual shuffle.
    """
    if k > n:
        raise ValueError(f"cannot sample {k} from {n}")
    pool = list(range(n))
    for i in range(k):
        j = i + rng.below(n - i)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def sample(items: Sequence[T], k: int, rng: SplitMix64) -> list[T]:
    return [items[i] for i in sample_indices(len(items), k, rng)]
