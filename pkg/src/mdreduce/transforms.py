"""Closure operations on valuations.

All wrappers are lazy: a value is computed on demand from the wrapped
valuation, so grounds far beyond the explicit-table cap stay cheap to query
whenever a fast path applies.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ._config import check_cap
from .errors import GroundSizeMismatch, NotMatroidBased
from .itemsets import as_itemset, members, subsets_of
from .valuations import MatroidBased, Valuation


@dataclass(frozen=True)
class Scaled(Valuation):
    factor: int
    inner: Valuation

    @property
    def ground_size(self) -> int:
        return self.inner.ground_size

    def _value(self, s):
        return self.factor * self.inner._value(s)


@dataclass(frozen=True)
class DisjointUnion(Valuation):
    """Sum of the parts, each evaluated on its own consecutive block of items."""

    parts: tuple[Valuation, ...]
    offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __init__(self, parts: Sequence[Valuation]):
        parts = tuple(parts)
        offs, acc = [], 0
        for p in parts:
            offs.append(acc)
            acc += p.ground_size
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "offsets", tuple(offs))

    @property
    def ground_size(self) -> int:
        return sum(p.ground_size for p in self.parts)

    def block_of(self, item: int) -> tuple[int, int]:
        """``(part index, local item index)`` of a global item."""
        b = bisect_right(self.offsets, item) - 1
        return b, item - self.offsets[b]

    def split(self, s: Iterable[int]) -> list[frozenset]:
        """Per-part slices of ``s`` in local coordinates."""
        out: list[list[int]] = [[] for _ in self.parts]
        for i in s:
            b, j = self.block_of(i)
            out[b].append(j)
        return [frozenset(x) for x in out]

    def _value(self, s):
        return sum(p._value(t) for p, t in zip(self.parts, self.split(s)))


@dataclass(frozen=True)
class ValueTruncated(Valuation):
    x: int
    inner: Valuation

    @property
    def ground_size(self) -> int:
        return self.inner.ground_size

    def _value(self, s):
        return min(self.inner._value(s), self.x)


@dataclass(frozen=True)
class Restriction(Valuation):
    """``inner`` seen on the sub-ground ``items``: local item ``j`` is ``items[j]``."""

    items: tuple[int, ...]
    inner: Valuation

    def __init__(self, items: Sequence[int], inner: Valuation):
        object.__setattr__(self, "items", tuple(members(as_itemset(items, inner.ground_size))))
        object.__setattr__(self, "inner", inner)

    @property
    def ground_size(self) -> int:
        return len(self.items)

    def _value(self, s):
        return self.inner._value(frozenset(self.items[j] for j in s))


@dataclass(frozen=True)
class ItemTruncated(Valuation):
    """Best value of a subset with at most ``y`` items."""

    y: int
    inner: Valuation

    @property
    def ground_size(self) -> int:
        return self.inner.ground_size

    def _value(self, s):
        if len(s) <= self.y:
            return self.inner._value(s)
        blocks = matroid_blocks(self.inner)
        if blocks is not None:
            return _greedy_truncated(blocks, self.y, s)[0]
        return exhaustive_item_truncated_value(self.inner, self.y, s)


def scale(v: Valuation, c: int) -> Scaled:
    if c < 1:
        raise ValueError("scaling factor must be a positive integer")
    return Scaled(int(c), v)


def disjoint_union(*parts: Valuation) -> DisjointUnion:
    return DisjointUnion(parts)


def item_truncate(v: Valuation, y: int) -> ItemTruncated:
    if y < 0:
        raise ValueError("truncation parameter must be non-negative")
    return ItemTruncated(int(y), v)


def value_truncate(v: Valuation, x: int) -> ValueTruncated:
    if x < 0:
        raise ValueError("truncation parameter must be non-negative")
    return ValueTruncated(int(x), v)


def exhaustive_item_truncated_value(v: Valuation, y: int, s: Iterable[int], cap: int | None = None) -> int:
    s = frozenset(s)
    check_cap(len(s), cap, what="item truncation")
    return max(v._value(t) for t in subsets_of(s, y))


def scaled_disjoint_union(v: Valuation, w: Valuation, k: int) -> list[DisjointUnion]:
    """The ``k`` valuations on ``k - 1`` copies of the ``m`` items.

    Valuation ``l`` (1-based) weighs copy ``i`` by ``k + i`` and values it
    with ``v`` when ``i >= l`` and with ``w`` when ``i < l``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if v.ground_size != w.ground_size:
        raise GroundSizeMismatch("v and w must share a ground set")
    return [
        DisjointUnion([Scaled(k + i, v if i >= ell else w) for i in range(1, k)])
        for ell in range(1, k + 1)
    ]


# -- greedy value queries for truncated matroid-based valuations ----------------


def matroid_blocks(v: Valuation) -> list[tuple[int, int, MatroidBased]] | None:
    """Decompose ``v`` into ``(offset, factor, matroid-based part)`` blocks, or None."""
    if isinstance(v, MatroidBased):
        return [(0, 1, v)]
    if isinstance(v, Scaled):
        inner = matroid_blocks(v.inner)
        if inner is None:
            return None
        return [(o, f * v.factor, b) for o, f, b in inner]
    if isinstance(v, DisjointUnion):
        out = []
        for off, part in zip(v.offsets, v.parts):
            inner = matroid_blocks(part)
            if inner is None:
                return None
            out.extend((off + o, f, b) for o, f, b in inner)
        return out
    return None


def _greedy_truncated(blocks, y: int, s: frozenset) -> tuple[int, int]:
    starts = [o for o, _, _ in blocks]

    def locate(e):
        b = bisect_right(starts, e) - 1
        return b, e - starts[b]

    queries = 0
    single = {}
    for e in s:
        b, j = locate(e)
        _, f, val = blocks[b]
        single[e] = f * val._value(frozenset((j,)))
        queries += 1
    order = sorted(s, key=lambda e: (-single[e], e))

    chosen: dict[int, frozenset] = {}
    block_val: dict[int, int] = {}
    size = 0
    for e in order:
        if size == y:
            break
        b, j = locate(e)
        _, f, val = blocks[b]
        cur = chosen.get(b, frozenset())
        before = val._value(cur)
        after = val._value(cur | {j})
        queries += 2
        if f * (after - before) > 0:
            chosen[b] = cur | {j}
            block_val[b] = after
            size += 1
    total = sum(blocks[b][1] * x for b, x in block_val.items())
    return total, queries


def fast_truncated_value(vl: ItemTruncated, s: Iterable[int]) -> tuple[int, int]:
    """Greedy value of an item-truncated matroid-based valuation.

    Returns ``(value, queries)``, where ``queries`` counts value queries to
    the underlying matroid-based parts (at most three per element of ``s``).
    """
    if not isinstance(vl, ItemTruncated):
        raise NotMatroidBased("expected an item-truncated valuation")
    blocks = matroid_blocks(vl.inner)
    if blocks is None:
        raise NotMatroidBased("inner valuation is not built from matroid-based parts")
    s = as_itemset(s, vl.ground_size)
    return _greedy_truncated(blocks, vl.y, s)


@dataclass(frozen=True)
class TrivialItemReduction:
    """Result of :func:`preprocess_trivial_items`.

    ``kept`` lists the surviving original items; reduced item ``j`` is
    ``kept[j]``.
    """

    v: Valuation
    w: Valuation
    removed_for_v: frozenset
    removed_for_w: frozenset
    kept: tuple[int, ...]

    def lift(self, a: Iterable[int]) -> frozenset:
        """Map a reduced solution back to original items and re-insert the w-trivial items."""
        return frozenset(self.kept[j] for j in a) | self.removed_for_w


def preprocess_trivial_items(v: Valuation, w: Valuation) -> TrivialItemReduction:
    """Drop every item ``i`` with ``v({i}) = 0`` or ``w({i}) = 0``."""
    if v.ground_size != w.ground_size:
        raise GroundSizeMismatch("v and w must share a ground set")
    m = v.ground_size
    rv = frozenset(i for i in range(m) if v._value(frozenset((i,))) == 0)
    rw = frozenset(i for i in range(m) if w._value(frozenset((i,))) == 0)
    if not rv and not rw:
        return TrivialItemReduction(v, w, rv, rw, tuple(range(m)))
    kept = tuple(i for i in range(m) if i not in rv and i not in rw)
    return TrivialItemReduction(Restriction(kept, v), Restriction(kept, w), rv, rw, kept)
