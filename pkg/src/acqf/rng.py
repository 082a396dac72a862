"""Deterministic random stream derivation.

Every (cell, replicate) pair of a run gets its own PCG64 generator whose
full 128-bit state and stream increment are derived from the master seed
with SplitMix64 arithmetic. The derivation is spelled out below so an
independent port can reproduce the streams bit for bit:

1. Key folding. Starting from h = master seed, fold in each context word
   (first the cell index, then the replicate index):

       h = mix64((h XOR word) + 0x9E3779B97F4A7C15 mod 2^64)

   where mix64 is the SplitMix64 finalizer

       z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9  (mod 2^64)
       z ^= z >> 27;  z *= 0x94D049BB133111EB  (mod 2^64)
       z ^= z >> 31

2. Expansion. Run SplitMix64 from state h for four outputs w1..w4
   (state += 0x9E3779B97F4A7C15; output = mix64(state)).

3. Generator. Seed PCG64 with state = w1 * 2^64 + w2 and
   increment = (w3 * 2^64 + w4) | 1.

Uniform doubles are then numpy's Generator.random, i.e. the top 53 bits
of each 64-bit PCG64 output scaled by 2^-53.
"""
from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1

MAX_SEED = _MASK64


def mix64(z: int) -> int:
    """SplitMix64 output scrambler."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def fold(h: int, word: int) -> int:
    """Absorb one 64-bit context word into the running key."""
    return mix64(((h ^ (word & _MASK64)) + GOLDEN) & _MASK64)


def derive_words(seed: int, cell: int, replicate: int, count: int = 4) -> list[int]:
    """SplitMix64 expansion of the folded (seed, cell, replicate) key."""
    h = fold(fold(seed & _MASK64, cell), replicate)
    out = []
    for _ in range(count):
        h = (h + GOLDEN) & _MASK64
        out.append(mix64(h))
    return out


def make_generator(seed: int, cell: int = 0, replicate: int = 0) -> np.random.Generator:
    """PCG64 generator for one (seed, cell, replicate) triple."""
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must fit in 64 bits, got {seed!r}")
    if cell < 0 or replicate < 0:
        raise ValueError("cell and replicate indices must be non-negative")
    w1, w2, w3, w4 = derive_words(seed, cell, replicate)
    bg = np.random.PCG64()
    bg.state = {
        "bit_generator": "PCG64",
        "state": {"state": (w1 << 64) | w2, "inc": ((w3 << 64) | w4) | 1},
        "has_uint32": 0,
        "uinteger": 0,
    }
    return np.random.Generator(bg)
