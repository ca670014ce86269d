"""Deterministic seed derivation for replicated simulations.

Every stochastic routine in this package draws from a ``numpy`` generator
seeded through :func:`mix_seed`, so replicate r (or grid cell (i, j)) gets
the same stream no matter how the surrounding loop is ordered or batched.
"""

from __future__ import annotations

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK
    x ^= x >> 31
    return x


def mix_seed(*parts: int) -> int:
    """Fold integer parts (master seed, replicate, row, column, ...) into one
    64-bit seed. Stable across platforms and independent of evaluation order."""
    state = 0
    for part in parts:
        state = _splitmix64((state ^ (int(part) & _MASK)) & _MASK)
    return state
