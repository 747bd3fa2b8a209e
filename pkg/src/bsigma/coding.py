"""Integer codings for tuples, finite sets and oracle tapes.

Increasing tuples are indexed with the combinatorial number system, so that
``tuple_index((x, y)) == x + y*(y-1)//2`` and every index names exactly one
increasing tuple of the given length.
"""
from __future__ import annotations

from math import comb, isqrt
from typing import Iterable, Sequence


def tuple_index(t: Sequence[int]) -> int:
    """Index of a strictly increasing tuple among all tuples of its length."""
    prev = -1
    total = 0
    for i, v in enumerate(t):
        if v <= prev:
            raise ValueError(f"tuple is not strictly increasing: {tuple(t)}")
        prev = v
        total += comb(v, i + 1)
    return total


def tuple_from_index(index: int, length: int) -> tuple[int, ...]:
    out = []
    for r in range(length, 0, -1):
        # largest v with comb(v, r) <= index
        lo, hi = r - 1, r - 1
        while comb(hi, r) <= index:
            hi = 2 * hi + 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if comb(mid, r) <= index:
                lo = mid
            else:
                hi = mid - 1
        out.append(lo)
        index -= comb(lo, r)
    return tuple(reversed(out))


def pair_index(x: int, y: int) -> int:
    return tuple_index((x, y))


def pair_from_index(index: int) -> tuple[int, int]:
    return tuple_from_index(index, 2)  # type: ignore[return-value]


def cantor(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def uncantor(z: int) -> tuple[int, int]:
    d = (isqrt(8 * z + 1) - 1) // 2
    b = z - d * (d + 1) // 2
    return d - b, b


def cantor_tuple(values: Sequence[int]) -> int:
    """Right-nested Cantor code of a non-empty tuple of fixed length."""
    code = values[-1]
    for v in reversed(values[:-1]):
        code = cantor(v, code)
    return code


def uncantor_tuple(code: int, length: int) -> tuple[int, ...]:
    out = []
    for _ in range(length - 1):
        a, code = uncantor(code)
        out.append(a)
    out.append(code)
    return tuple(out)


def set_code(members: Iterable[int]) -> int:
    """Canonical code of a finite set as a bitmask."""
    code = 0
    for x in members:
        code |= 1 << x
    return code


def set_decode(code: int) -> frozenset[int]:
    out = []
    x = 0
    while code:
        if code & 1:
            out.append(x)
        code >>= 1
        x += 1
    return frozenset(out)


# Two-tape oracles: I0 lives on even positions, S1 on odd positions.

def left(p: int) -> int:
    return 2 * p


def right(p: int) -> int:
    return 2 * p + 1


def family_position(stage: int, member: int, size: int) -> int:
    """Tape position carrying what enters set ``member`` at ``stage``.

    Position 0 holds the family size; ``1 + stage*size + member`` holds the
    bitmask code of ``W_{member, stage+1} - W_{member, stage}``.
    """
    return 1 + stage * size + member


_MASK = (1 << 64) - 1


def mix(*values: int) -> int:
    """Deterministic 64-bit hash of a tuple of integers (splitmix64 chain)."""
    z = 0x9E3779B97F4A7C15
    for v in values:
        z = (z ^ (v & _MASK)) & _MASK
        z = (z + 0x9E3779B97F4A7C15) & _MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        z ^= z >> 31
    return z
