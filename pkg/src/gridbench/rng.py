"""Portable SplitMix64 generator.

Python's ``random`` module makes no promise that ``randrange`` produces the
same stream across interpreter versions, and numpy's bit-stream policy is
similar. Suites must be byte-identical everywhere, so generation uses this
fixed 64-bit generator instead. Independent streams are derived by mixing a
tuple of integers/strings into the seed, so e.g. adding endpoint pairs never
perturbs the obstacle layout of the same environment.
"""

from __future__ import annotations

import hashlib

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def derive_seed(*parts: int | str) -> int:
    """Fold integers and strings into one 64-bit seed, deterministically."""
    state = 0x6A09E667F3BCC909
    for part in parts:
        if isinstance(part, str):
            value = int.from_bytes(hashlib.sha256(part.encode("utf-8")).digest()[:8], "little")
        else:
            value = int(part) & MASK64
        state = mix64((state ^ value) + GOLDEN_GAMMA & MASK64)
    return state


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    @classmethod
    def stream(cls, *parts: int | str) -> SplitMix64:
        return cls(derive_seed(*parts))

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = MASK64 + 1 - ((MASK64 + 1) % bound)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % bound

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]`` inclusive."""
        return lo + self.below(hi - lo + 1)

    def choice(self, seq):
        return seq[self.below(len(seq))]
