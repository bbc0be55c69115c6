"""Item sets over a ground set ``[0, m)`` and the combinatorics on them.

Item sets are plain ``frozenset`` objects of non-negative integers.  The
helpers here validate them against a ground size, enumerate subsets under
the enumeration cap, and rank/unrank fixed-size subsets in lexicographic
order of their sorted member lists.
"""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterable, Iterator

from ._config import check_cap
from .errors import GroundSizeMismatch

ItemSet = frozenset

EMPTY: frozenset = frozenset()


def as_itemset(items: Iterable[int], ground_size: int) -> frozenset:
    """Return ``items`` as a frozenset after checking every index lies in ``[0, ground_size)``."""
    s = items if isinstance(items, frozenset) else frozenset(items)
    for i in s:
        if not isinstance(i, int) or isinstance(i, bool) or i < 0 or i >= ground_size:
            raise GroundSizeMismatch(f"item {i!r} outside ground set of size {ground_size}")
    return s


def members(s: Iterable[int]) -> tuple[int, ...]:
    """Sorted member list; also the lexicographic comparison key."""
    return tuple(sorted(s))


def demand_key(s: Iterable[int]) -> tuple:
    """Tie-break key for optimizers: larger sets first, then lexicographically smallest members."""
    m = members(s)
    return (-len(m), m)


def full_set(ground_size: int) -> frozenset:
    return frozenset(range(ground_size))


def from_mask(mask: int) -> frozenset:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def to_mask(s: Iterable[int]) -> int:
    mask = 0
    for i in s:
        mask |= 1 << i
    return mask


def all_subsets(ground_size: int, cap: int | None = None) -> Iterator[frozenset]:
    """Every subset of ``[0, ground_size)``, in increasing bitmask order."""
    check_cap(ground_size, cap)
    for mask in range(1 << ground_size):
        yield from_mask(mask)


def subsets_of(s: Iterable[int], max_size: int | None = None) -> Iterator[frozenset]:
    """Every subset of ``s`` with at most ``max_size`` members, by size then lexicographically."""
    items = members(s)
    top = len(items) if max_size is None else min(max_size, len(items))
    for r in range(top + 1):
        for c in combinations(items, r):
            yield frozenset(c)


def subset_rank(m: int, s: Iterable[int], size: int | None = None) -> int:
    """1-based lexicographic rank of ``s`` among the ``size``-subsets of ``[0, m)``.

    ``size`` defaults to ``m // 2`` (the perturbing sets of the binary OXS
    family).
    """
    k = m // 2 if size is None else size
    c = members(s)
    if len(c) != k:
        raise ValueError(f"expected a subset of size {k}, got {len(c)}")
    as_itemset(c, m)
    rank = 0
    prev = -1
    for pos, elem in enumerate(c):
        for j in range(prev + 1, elem):
            rank += comb(m - 1 - j, k - 1 - pos)
        prev = elem
    return rank + 1


def subset_unrank(m: int, index: int, size: int | None = None) -> frozenset:
    """Inverse of :func:`subset_rank`."""
    k = m // 2 if size is None else size
    total = comb(m, k)
    if not 1 <= index <= total:
        raise ValueError(f"index {index} outside [1, {total}]")
    r = index - 1
    out = []
    elem = 0
    for pos in range(k):
        while True:
            block = comb(m - 1 - elem, k - 1 - pos)
            if r < block:
                break
            r -= block
            elem += 1
        out.append(elem)
        elem += 1
    return frozenset(out)
