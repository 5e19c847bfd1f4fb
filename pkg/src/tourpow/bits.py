"""Vertex sets as Python int bitmasks.

Bit ``v`` of a mask is set iff vertex ``v`` belongs to the set. All
neighbourhood algebra in the package goes through these helpers.
"""
from __future__ import annotations

from typing import Iterable, Iterator


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_list(mask: int) -> list[int]:
    return list(iter_bits(mask))


def popcount(mask: int) -> int:
    return mask.bit_count()


def lowest(mask: int) -> int:
    """Smallest vertex in a nonempty mask."""
    return (mask & -mask).bit_length() - 1


def full_mask(n: int) -> int:
    return (1 << n) - 1
