"""Seeded 64-bit PRNG shared by the Python API and the compiled training loop.

The generator is xoshiro256** (Blackman & Vigna), with its 256-bit state
expanded from a single 64-bit seed by splitmix64. State lives in a
``uint64[4]`` numpy array so the exact same stream can be advanced either
from Python (``Rng`` methods) or from inside numba kernels (the ``*_u64``
/ ``uniform`` / ``below`` functions below).

Derived draws:

* ``uniform``: top 53 bits of the next output scaled to [0, 1).
* ``below(n)``: unbiased integer in [0, n) by rejection; outputs smaller
  than ``2**64 mod n`` are discarded, the rest reduced modulo ``n``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0


def splitmix64_seed(seed: int) -> np.ndarray:
    """Expand a 64-bit seed into a xoshiro256** state array."""
    x = int(seed) & MASK64
    out = np.empty(4, dtype=np.uint64)
    for i in range(4):
        x = (x + _GOLDEN) & MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out[i] = z ^ (z >> 31)
    return out


@njit(cache=True, nogil=True)
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(cache=True, nogil=True)
def next_u64(s):
    result = _rotl(s[1] * np.uint64(5), 7) * np.uint64(9)
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@njit(cache=True, nogil=True)
def uniform(s):
    return np.float64(next_u64(s) >> np.uint64(11)) * _INV_2_53


@njit(cache=True, nogil=True)
def below(s, n):
    un = np.uint64(n)
    threshold = (np.uint64(0) - un) % un
    while True:
        x = next_u64(s)
        if x >= threshold:
            return np.int64(x % un)


class Rng:
    """Python handle on a xoshiro256** stream.

    >>> a, b = Rng(7), Rng(7)
    >>> [a.below(10) for _ in range(5)] == [b.below(10) for _ in range(5)]
    True
    """

    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        self.state = splitmix64_seed(seed)

    @classmethod
    def from_state(cls, state) -> "Rng":
        rng = cls.__new__(cls)
        rng.state = np.array(state, dtype=np.uint64).copy()
        return rng

    def next_u64(self) -> int:
        return int(next_u64(self.state))

    def random(self) -> float:
        return float(uniform(self.state))

    def below(self, n: int) -> int:
        if n < 1:
            raise ValueError(f"below() needs n >= 1, got {n}")
        return int(below(self.state, n))

    def copy(self) -> "Rng":
        return Rng.from_state(self.state)
