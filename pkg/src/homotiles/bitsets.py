"""Subsets of a finite abelian group as int bitmasks, with O(factors) translation.

Bit ``i`` stands for ``G.from_index(i)`` (mixed radix, last factor fastest).
Translating a coordinate is a rotation inside blocks of the mask, done with
two shifts and two precomputed masks, so exact-cover searches never touch
element tuples in their inner loop.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

from homotiles.groups import Element, GroupSpec


class BitGroup:
    def __init__(self, factors: tuple[int, ...]):
        self.factors = factors
        self.size = 1
        for m in factors:
            self.size *= m
        self.full = (1 << self.size) - 1
        strides = []
        s = 1
        for m in reversed(factors):
            strides.append(s)
            s *= m
        self.strides = tuple(reversed(strides))
        # low[i][t]: positions whose i-th coordinate c satisfies c < n_i - t
        self._low = []
        for i, m in enumerate(factors):
            stride = self.strides[i]
            per_t = [self.full]
            for t in range(1, m):
                mask = 0
                for pos in range(self.size):
                    if (pos // stride) % m < m - t:
                        mask |= 1 << pos
                per_t.append(mask)
            self._low.append(per_t)
        self.coords = [self._coords(i) for i in range(self.size)]

    def _coords(self, i: int) -> Element:
        out = []
        for m in reversed(self.factors):
            i, c = divmod(i, m)
            out.append(c)
        return tuple(reversed(out))

    def index(self, x: Element) -> int:
        i = 0
        for c, m in zip(x, self.factors):
            i = i * m + c
        return i

    def mask(self, xs: Iterable[Element]) -> int:
        out = 0
        for x in xs:
            out |= 1 << self.index(x)
        return out

    def members(self, mask: int) -> list[Element]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.coords[low.bit_length() - 1])
            mask ^= low
        return out

    def indices(self, mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    def shift(self, mask: int, t: Element) -> int:
        """Bitmask of {x + t : x in mask}."""
        for i, c in enumerate(t):
            if c:
                m = self.factors[i]
                k = c * self.strides[i]
                block = m * self.strides[i]
                low = self._low[i][c]
                mask = ((mask & low) << k) | ((mask & ~low & self.full) >> (block - k))
        return mask

    def diff_index(self, x: int, y: int) -> Element:
        """Coordinates of x - y for two bit positions."""
        return tuple((a - b) % m for a, b, m in zip(self.coords[x], self.coords[y], self.factors))


def bitgroup(G: GroupSpec | tuple[int, ...]) -> BitGroup:
    return _bitgroup(G.factors if isinstance(G, GroupSpec) else tuple(G))


@lru_cache(maxsize=64)
def _bitgroup(factors: tuple[int, ...]) -> BitGroup:
    return BitGroup(factors)
