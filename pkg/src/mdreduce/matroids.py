"""Matroids on ``[0, m)``: representations, axiom checks, rank and weighted greedy."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from ._config import check_cap
from .itemsets import all_subsets, as_itemset, from_mask, members, to_mask


class Matroid:
    """Abstract independence system; subclasses implement ``_independent``."""

    ground_size: int

    def is_independent(self, s: Iterable[int]) -> bool:
        return self._independent(as_itemset(s, self.ground_size))

    def _independent(self, s: frozenset) -> bool:
        raise NotImplementedError

    def independent_sets(self, cap: int | None = None) -> list[frozenset]:
        return [s for s in all_subsets(self.ground_size, cap) if self._independent(s)]

    def rank(self, s: Iterable[int] | None = None) -> int:
        """Size of a largest independent subset of ``s`` (the full ground set by default)."""
        if s is None:
            s = range(self.ground_size)
        t, _ = greedy_max_weight(WeightedMatroid(self, (1,) * self.ground_size), s)
        return len(t)


@dataclass(frozen=True)
class ExplicitIndependent(Matroid):
    """Matroid given by listing its independent sets.  Axioms are not checked here."""

    ground_size: int
    independent: frozenset

    def __init__(self, ground_size: int, independent: Iterable[Iterable[int]]):
        fam = frozenset(as_itemset(s, ground_size) for s in independent)
        object.__setattr__(self, "ground_size", ground_size)
        object.__setattr__(self, "independent", fam)

    def _independent(self, s):
        return s in self.independent


@dataclass(frozen=True)
class Uniform(Matroid):
    ground_size: int
    rank_cap: int

    def _independent(self, s):
        return len(s) <= self.rank_cap


@dataclass(frozen=True)
class Partition(Matroid):
    """Blocks partition (a subset of) the ground; block ``b`` admits at most ``caps[b]`` elements.

    Elements outside every block are unconstrained.
    """

    ground_size: int
    blocks: tuple[frozenset, ...]
    caps: tuple[int, ...]

    def __init__(self, ground_size: int, blocks: Sequence[Iterable[int]], caps: Sequence[int]):
        bl = tuple(as_itemset(b, ground_size) for b in blocks)
        if len(bl) != len(caps):
            raise ValueError("one cap per block required")
        seen: set = set()
        for b in bl:
            if seen & b:
                raise ValueError("partition blocks overlap")
            seen |= b
        object.__setattr__(self, "ground_size", ground_size)
        object.__setattr__(self, "blocks", bl)
        object.__setattr__(self, "caps", tuple(int(c) for c in caps))

    def _independent(self, s):
        return all(len(s & b) <= c for b, c in zip(self.blocks, self.caps))


@dataclass(frozen=True)
class Truncated(Matroid):
    """Independent sets of ``inner`` with at most ``y`` elements."""

    y: int
    inner: Matroid

    @property
    def ground_size(self) -> int:
        return self.inner.ground_size

    def _independent(self, s):
        return len(s) <= self.y and self.inner._independent(s)


def truncate(matroid: Matroid, y: int) -> Truncated:
    if y < 0:
        raise ValueError("truncation parameter must be non-negative")
    return Truncated(y, matroid)


def direct_sum(first: Matroid, second: Matroid, cap: int | None = None) -> ExplicitIndependent:
    """Direct sum with ``second`` shifted past ``first``, materialized as an explicit matroid."""
    a = first.independent_sets(cap)
    b = second.independent_sets(cap)
    off = first.ground_size
    fam = [s | frozenset(i + off for i in t) for s in a for t in b]
    return ExplicitIndependent(first.ground_size + second.ground_size, fam)


@dataclass(frozen=True)
class AxiomReport:
    ok: bool
    axiom: str | None = None
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def verify_axioms(matroid: Matroid, cap: int | None = None) -> AxiomReport:
    """Exhaustively check the empty set, downward closure and augmentation.

    On failure, ``witness`` holds the offending sets: ``(I, J)`` with ``J``
    a missing subset of independent ``I`` for downward closure, or
    ``(I, J)`` with ``|I| < |J|`` and no ``e`` in ``J - I`` extending ``I``.
    """
    m = matroid.ground_size
    check_cap(m, cap)
    indep_masks = {to_mask(s) for s in matroid.independent_sets(cap)}
    if 0 not in indep_masks:
        return AxiomReport(False, "empty-set", (frozenset(),))
    for mask in sorted(indep_masks, key=lambda k: members(from_mask(k))):
        bit = mask
        while bit:
            low = bit & -bit
            bit ^= low
            if mask ^ low not in indep_masks:
                return AxiomReport(False, "downward-closure", (from_mask(mask), from_mask(mask ^ low)))
    by_size: dict[int, list[int]] = {}
    for mask in indep_masks:
        by_size.setdefault(bin(mask).count("1"), []).append(mask)
    # downward closure holds, so augmentation only needs |J| = |I| + 1
    for size in sorted(by_size):
        for i_mask in sorted(by_size[size]):
            for j_mask in sorted(by_size.get(size + 1, ())):
                diff = j_mask & ~i_mask
                ok = False
                while diff:
                    low = diff & -diff
                    diff ^= low
                    if i_mask | low in indep_masks:
                        ok = True
                        break
                if not ok:
                    return AxiomReport(False, "augmentation", (from_mask(i_mask), from_mask(j_mask)))
    return AxiomReport(True)


@dataclass(frozen=True)
class WeightedMatroid:
    matroid: Matroid
    weights: tuple

    def __init__(self, matroid: Matroid, weights: Sequence):
        if len(weights) != matroid.ground_size:
            raise ValueError("one weight per ground element required")
        object.__setattr__(self, "matroid", matroid)
        object.__setattr__(self, "weights", tuple(weights))


def greedy_max_weight(wm: WeightedMatroid, s: Iterable[int]) -> tuple[frozenset, int]:
    """Max-weight independent subset of ``s``.

    Elements are scanned by descending weight, ties by smaller index; an
    element with positive weight is kept when it preserves independence.
    """
    m = wm.matroid
    s = as_itemset(s, m.ground_size)
    return _greedy(m, wm.weights, s)


def _greedy(m: Matroid, weights, s: frozenset) -> tuple[frozenset, int]:
    order = sorted(s, key=lambda e: (-weights[e], e))
    chosen: list[int] = []
    total = 0
    for e in order:
        if weights[e] <= 0:
            break
        cand = frozenset(chosen) | {e}
        if m._independent(cand):
            chosen.append(e)
            total += weights[e]
    return frozenset(chosen), total


def brute_force_max_weight(wm: WeightedMatroid, s: Iterable[int]) -> tuple[frozenset, int]:
    """Reference maximum by enumerating every subset of ``s``; for tests and small inputs."""
    s = members(as_itemset(s, wm.matroid.ground_size))
    best, best_w = frozenset(), 0
    for r in range(len(s) + 1):
        for c in combinations(s, r):
            t = frozenset(c)
            if wm.matroid._independent(t):
                w = sum(wm.weights[i] for i in t)
                if w > best_w:
                    best, best_w = t, w
    return best, best_w
