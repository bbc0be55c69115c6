"""Valuation functions over item sets, with value and demand oracles.

Every valuation is an immutable object exposing ``ground_size`` and
``value(S)``.  Values are exact non-negative integers.  The closure
wrappers (scaling, disjoint union, truncations, restriction) live in
:mod:`mdreduce.transforms`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from ._config import check_cap
from .errors import GroundSizeMismatch, MissingEntry
from .itemsets import (
    EMPTY,
    all_subsets,
    as_itemset,
    demand_key,
    from_mask,
    full_set,
    members,
    subset_rank,
)
from .matching import max_weight_matching
from .matroids import Matroid, _greedy


class Valuation:
    """Base class.  Subclasses implement ``_value`` on validated frozensets."""

    ground_size: int

    def value(self, s: Iterable[int]) -> int:
        return self._value(as_itemset(s, self.ground_size))

    def __call__(self, s: Iterable[int]) -> int:
        return self.value(s)

    def _value(self, s: frozenset) -> int:
        raise NotImplementedError

    def full_value(self) -> int:
        return self._value(full_set(self.ground_size))


def value(v: Valuation, s: Iterable[int]) -> int:
    return v.value(s)


@dataclass(frozen=True)
class ExplicitTable(Valuation):
    """A value for every subset of ``[0, ground_size)``."""

    ground_size: int
    table: Mapping[frozenset, int]

    def __init__(self, ground_size: int, table: Mapping[Iterable[int], int] | Sequence[int], check: bool = True):
        if isinstance(table, Mapping):
            t = {as_itemset(k, ground_size): int(x) for k, x in table.items()}
        else:
            # sequence indexed by bitmask
            t = {from_mask(i): int(x) for i, x in enumerate(table)}
        if check and len(t) != 1 << ground_size:
            missing = next(s for s in all_subsets(ground_size) if s not in t)
            raise MissingEntry(f"no table entry for {members(missing)}")
        object.__setattr__(self, "ground_size", ground_size)
        object.__setattr__(self, "table", t)

    def __hash__(self):
        return hash((self.ground_size, frozenset(self.table.items())))

    def _value(self, s):
        try:
            return self.table[s]
        except KeyError:
            raise MissingEntry(f"no table entry for {members(s)}") from None


@dataclass(frozen=True)
class Additive(Valuation):
    weights: tuple[int, ...]

    def __init__(self, weights: Sequence[int]):
        object.__setattr__(self, "weights", tuple(int(w) for w in weights))

    @property
    def ground_size(self) -> int:
        return len(self.weights)

    def _value(self, s):
        return sum(self.weights[i] for i in s)


@dataclass(frozen=True)
class CDemand(Valuation):
    """Sum of the ``c`` largest weights in the set."""

    c: int
    weights: tuple[int, ...]

    def __init__(self, c: int, weights: Sequence[int]):
        object.__setattr__(self, "c", int(c))
        object.__setattr__(self, "weights", tuple(int(w) for w in weights))

    @property
    def ground_size(self) -> int:
        return len(self.weights)

    def _value(self, s):
        return sum(sorted((self.weights[i] for i in s), reverse=True)[: self.c])


@dataclass(frozen=True)
class OXS(Valuation):
    """Max-weight matching of the left nodes in ``S`` against all right nodes.

    ``weights[i][r]`` is the edge weight between item ``i`` and right node
    ``r`` (0 for no edge).
    """

    weights: tuple[tuple[int, ...], ...]
    right_size: int

    def __init__(self, weights: Sequence[Sequence[int]], right_size: int | None = None):
        w = tuple(tuple(int(x) for x in row) for row in weights)
        r = len(w[0]) if (right_size is None and w) else (right_size or 0)
        if any(len(row) != r for row in w):
            raise ValueError("OXS weight grid is not rectangular")
        if any(x < 0 for row in w for x in row):
            raise ValueError("OXS weights must be non-negative")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "right_size", r)

    @property
    def ground_size(self) -> int:
        return len(self.weights)

    @property
    def is_binary(self) -> bool:
        return all(x in (0, 1) for row in self.weights for x in row)

    def _value(self, s):
        if not s or self.right_size == 0:
            return 0
        rows = [self.weights[i] for i in sorted(s)]
        return max_weight_matching(rows)[1]


@dataclass(frozen=True)
class MatroidBased(Valuation):
    """Weight of a max-weight independent subset; matroid-rank when all weights are 1."""

    matroid: Matroid
    weights: tuple[int, ...]

    def __init__(self, matroid: Matroid, weights: Sequence[int] | None = None):
        if weights is None:
            weights = (1,) * matroid.ground_size
        if len(weights) != matroid.ground_size:
            raise GroundSizeMismatch("one weight per ground element required")
        object.__setattr__(self, "matroid", matroid)
        object.__setattr__(self, "weights", tuple(int(w) for w in weights))

    @property
    def ground_size(self) -> int:
        return self.matroid.ground_size

    def _value(self, s):
        return _greedy(self.matroid, self.weights, s)[1]


def _satisfies(cnf: tuple[tuple[int, ...], ...], bits: int) -> bool:
    # DIMACS literals: +j means x_j true, -j false; x_j is bit j-1 of the assignment
    for clause in cnf:
        if not any(((bits >> (abs(lit) - 1)) & 1) == (lit > 0) for lit in clause):
            return False
    return True


@dataclass(frozen=True)
class SatPerturbed(Valuation):
    """``base`` minus 1 on the size-m/2 sets whose encoded assignment satisfies ``cnf``.

    The set of lexicographic rank ``r`` encodes the assignment with bits
    ``r - 1`` (variable ``j`` is bit ``j - 1``) when ``r <= 2**num_vars``;
    higher ranks encode nothing and stay unperturbed.
    """

    base: Valuation
    cnf: tuple[tuple[int, ...], ...]
    num_vars: int

    def __init__(self, base: Valuation, cnf: Iterable[Iterable[int]], num_vars: int):
        clauses = tuple(tuple(int(x) for x in c) for c in cnf)
        for c in clauses:
            for lit in c:
                if lit == 0 or abs(lit) > num_vars:
                    raise ValueError(f"literal {lit} outside variables 1..{num_vars}")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "cnf", clauses)
        object.__setattr__(self, "num_vars", int(num_vars))

    @property
    def ground_size(self) -> int:
        return self.base.ground_size

    def is_perturbed_at(self, s: frozenset) -> bool:
        m = self.ground_size
        if len(s) != m // 2:
            return False
        r = subset_rank(m, s)
        if r > 1 << self.num_vars:
            return False
        return _satisfies(self.cnf, r - 1)

    def _value(self, s):
        base = self.base._value(s)
        return base - 1 if self.is_perturbed_at(s) else base


@dataclass(frozen=True)
class PointPerturbed(Valuation):
    """``base`` with its value at the single set ``at`` decreased by one."""

    base: Valuation
    at: frozenset

    def __init__(self, base: Valuation, at: Iterable[int]):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "at", as_itemset(at, base.ground_size))

    @property
    def ground_size(self) -> int:
        return self.base.ground_size

    def _value(self, s):
        x = self.base._value(s)
        return x - 1 if s == self.at else x


def _price_sum(prices, s) -> Fraction:
    return sum((prices[i] for i in s), Fraction(0))


def demand(v: Valuation, prices: Sequence, cap: int | None = None) -> frozenset:
    """A set maximizing ``v(T) - sum(prices[T])``, by exhaustive enumeration.

    Among optimal sets the largest is returned, then the lexicographically
    smallest member list.
    """
    m = v.ground_size
    if len(prices) != m:
        raise GroundSizeMismatch(f"{len(prices)} prices for {m} items")
    p = [Fraction(x) for x in prices]
    if any(x < 0 for x in p):
        raise ValueError("prices must be non-negative")
    best = EMPTY
    best_u = Fraction(0)
    best_key = demand_key(EMPTY)
    for s in all_subsets(m, cap):
        u = v._value(s) - _price_sum(p, s)
        if u > best_u or (u == best_u and demand_key(s) < best_key):
            best, best_u, best_key = s, u, demand_key(s)
    return best


def value_table(v: Valuation, cap: int | None = None) -> list[int]:
    """Values of ``v`` indexed by bitmask."""
    check_cap(v.ground_size, cap)
    return [v._value(from_mask(mask)) for mask in range(1 << v.ground_size)]


def extensionally_equal(a: Valuation, b: Valuation, cap: int | None = None) -> bool:
    if a.ground_size != b.ground_size:
        return False
    return all(a._value(s) == b._value(s) for s in all_subsets(a.ground_size, cap))


def to_explicit(v: Valuation, cap: int | None = None) -> ExplicitTable:
    return ExplicitTable(v.ground_size, value_table(v, cap))


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of :func:`check_properties`.  Every false flag carries a witness.

    ``monotone_witness`` is ``(S, T)`` with ``S`` a subset of ``T`` and
    ``v(S) > v(T)``; ``submodular_witness`` is ``(X, y, z)`` with
    ``v(X+y+z) - v(X+y) > v(X+z) - v(X)``.
    """

    normalized: bool
    monotone: bool
    monotone_witness: tuple | None
    trivial_items: tuple[int, ...]
    submodular: bool
    submodular_witness: tuple | None


def check_properties(v: Valuation, cap: int | None = None) -> PropertyReport:
    m = v.ground_size
    vals = value_table(v, cap)
    normalized = vals[0] == 0

    mono_w = None
    for mask in range(1 << m):
        for i in range(m):
            if not mask >> i & 1 and vals[mask] > vals[mask | 1 << i]:
                mono_w = (from_mask(mask), from_mask(mask | 1 << i))
                break
        if mono_w:
            break

    trivial = tuple(i for i in range(m) if vals[1 << i] == 0)

    sub_w = None
    # scan X by size then lexicographically, then pairs y < z outside X
    for size in range(m + 1):
        for xs in combinations(range(m), size):
            x = sum(1 << i for i in xs)
            rest = [i for i in range(m) if i not in xs]
            for y, z in combinations(rest, 2):
                xy, xz = x | 1 << y, x | 1 << z
                if vals[xy | 1 << z] - vals[xy] > vals[xz] - vals[x]:
                    sub_w = (frozenset(xs), y, z)
                    break
            if sub_w:
                break
        if sub_w:
            break

    return PropertyReport(
        normalized=normalized,
        monotone=mono_w is None,
        monotone_witness=mono_w,
        trivial_items=trivial,
        submodular=sub_w is None,
        submodular_witness=sub_w,
    )


@dataclass(frozen=True)
class TypeDistribution:
    """Explicit finite distribution over valuations with exact rational probabilities."""

    entries: tuple[tuple[Valuation, Fraction], ...]

    def __init__(self, entries: Iterable[tuple[Valuation, object]]):
        ents = tuple((v, Fraction(p)) for v, p in entries)
        if not ents:
            raise ValueError("distribution needs at least one type")
        m = ents[0][0].ground_size
        for v, p in ents:
            if v.ground_size != m:
                raise GroundSizeMismatch("all types must share a ground set")
            if p <= 0:
                raise ValueError(f"probability {p} is not positive")
        total = sum(p for _, p in ents)
        if total != 1:
            raise ValueError(f"probabilities sum to {total}")
        object.__setattr__(self, "entries", ents)

    @property
    def ground_size(self) -> int:
        return self.entries[0][0].ground_size

    @property
    def support(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)
