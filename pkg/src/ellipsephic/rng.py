"""Portable seeded random numbers for reproducible optimizer restarts.

The generator is splitmix64, chosen because it is tiny, fast, and exactly
specified, so any implementation in any language can reproduce the same
restart weights from the same 64-bit seed:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state
    z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
    z <- (z XOR (z >> 27)) * 0x94D049BB133111EB mod 2^64
    output <- z XOR (z >> 31)

Floats in [0, 1) are the top 53 bits of an output word: (u >> 11) * 2^-53.

Restart substreams: restart index r draws from a fresh generator seeded with
mix64((seed + r * 0x9E3779B97F4A7C15) mod 2^64) where mix64 is the finalizer
above, so substreams never share a sliding window of outputs.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """The splitmix64 output finalizer, usable as a hash on its own."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential splitmix64 stream."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_uint64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return mix64(self._state)

    def next_float(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_uint64() >> 11) * 2.0**-53

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound), unbiased via rejection."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            u = self.next_uint64()
            if u < limit:
                return u % bound


def substream(seed: int, index: int) -> SplitMix64:
    """Generator for the index-th independent substream of a master seed."""
    return SplitMix64(mix64((seed + index * _GOLDEN) & _MASK))
