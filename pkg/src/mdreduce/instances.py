"""Hard-instance families and random fixtures."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .itemsets import as_itemset, subset_rank, subset_unrank
from .matroids import ExplicitIndependent, Matroid, Partition, Truncated, Uniform
from .valuations import OXS, ExplicitTable, MatroidBased, PointPerturbed, SatPerturbed, Valuation

__all__ = [
    "PerturbableFamily",
    "boxs_family",
    "perturb",
    "pointwise_perturbation",
    "subset_rank",
    "subset_unrank",
    "sat_perturbed_valuation",
    "appendix_counterexample",
    "APPENDIX_ITEMS",
    "random_matroid",
    "random_matroid_valuation",
    "random_oxs",
]


@dataclass(frozen=True)
class PerturbableFamily:
    base: OXS
    m: int
    x: int  # number of perturbing sets
    y: int  # base value of the full set

    def perturbing_sets(self):
        for c in combinations(range(self.m), self.m // 2):
            yield frozenset(c)


def boxs_family(m: int) -> PerturbableFamily:
    """Complete bipartite binary OXS: ``m`` items, ``m/2`` right nodes, value ``min(|S|, m/2)``."""
    if m < 2 or m % 2:
        raise ValueError(f"m must be even and at least 2, got {m}")
    half = m // 2
    base = OXS([[1] * half for _ in range(m)])
    return PerturbableFamily(base=base, m=m, x=comb(m, half), y=half)


def perturb(fam: PerturbableFamily, s: Iterable[int]) -> OXS:
    """Binary OXS obtained by deleting the edges from every item in ``s`` to right node 0."""
    s = as_itemset(s, fam.m)
    if len(s) != fam.m // 2:
        raise ValueError(f"perturbing sets have size {fam.m // 2}, got {len(s)}")
    rows = [[0 if (i in s and r == 0) else w for r, w in enumerate(row)] for i, row in enumerate(fam.base.weights)]
    return OXS(rows, fam.base.right_size)


def pointwise_perturbation(fam: PerturbableFamily, s: Iterable[int]) -> PointPerturbed:
    return PointPerturbed(fam.base, s)


def sat_perturbed_valuation(fam: PerturbableFamily, cnf: Iterable[Iterable[int]], num_vars: int) -> SatPerturbed:
    if num_vars < 0 or 1 << num_vars > fam.x:
        raise ValueError(f"{num_vars} variables need 2^{num_vars} perturbing sets, only {fam.x} available")
    return SatPerturbed(fam.base, cnf, num_vars)


APPENDIX_ITEMS = "abcd"

_APPENDIX_PAIRS = {frozenset("cd"): 10}
_APPENDIX_TRIPLES = {frozenset("abc"): 9}


def appendix_counterexample() -> ExplicitTable:
    """Monotone submodular table on items a, b, c, d (indices 0..3) whose 2-item truncation is not submodular."""
    table = {}
    for r in range(5):
        for c in combinations(APPENDIX_ITEMS, r):
            key = frozenset(c)
            if r == 0:
                val = 0
            elif r == 1:
                val = 5
            elif r == 2:
                val = _APPENDIX_PAIRS.get(key, 9)
            elif r == 3:
                val = _APPENDIX_TRIPLES.get(key, 10)
            else:
                val = 10
            table[frozenset(APPENDIX_ITEMS.index(ch) for ch in c)] = val
    return ExplicitTable(4, table)


# -- random fixtures -------------------------------------------------------------


def _gf2_rank(vectors: Sequence[int]) -> int:
    basis: list[int] = []
    for vec in vectors:
        for b in basis:
            vec = min(vec, vec ^ b)
        if vec:
            basis.append(vec)
    return len(basis)


def random_matroid(rng: random.Random, m: int, loopless: bool = True) -> Matroid:
    """A random matroid on ``m`` elements drawn from several representations.

    Binary (GF(2)-linear) matroids are materialized explicitly.
    """
    kind = rng.choice(["uniform", "partition", "binary", "truncated"])
    if kind == "uniform":
        return Uniform(m, rng.randint(1 if loopless else 0, m))
    if kind == "partition":
        labels = [rng.randrange(max(1, m // 2)) for _ in range(m)]
        blocks = [[i for i in range(m) if labels[i] == b] for b in sorted(set(labels))]
        caps = [rng.randint(1, len(b)) for b in blocks]
        return Partition(m, blocks, caps)
    if kind == "binary":
        dim = rng.randint(1, max(1, m - 1))
        lo = 1 if loopless else 0
        vecs = [rng.randint(lo, (1 << dim) - 1) for _ in range(m)]
        indep = []
        for r in range(m + 1):
            for c in combinations(range(m), r):
                if _gf2_rank([vecs[i] for i in c]) == r:
                    indep.append(c)
        return ExplicitIndependent(m, indep)
    inner = random_matroid(rng, m, loopless)
    while isinstance(inner, Truncated):
        inner = random_matroid(rng, m, loopless)
    return Truncated(rng.randint(1, m), inner)


def random_matroid_valuation(rng: random.Random, m: int, max_weight: int = 5) -> MatroidBased:
    return MatroidBased(random_matroid(rng, m), [rng.randint(1, max_weight) for _ in range(m)])


def random_oxs(rng: random.Random, m: int, right: int | None = None, max_weight: int = 3) -> OXS:
    """Random OXS valuation with no trivial items (every item keeps a positive edge)."""
    right = right or rng.randint(1, max(1, m))
    rows = []
    for _ in range(m):
        row = [rng.randint(0, max_weight) for _ in range(right)]
        if not any(row):
            row[rng.randrange(right)] = rng.randint(1, max_weight)
        rows.append(row)
    return OXS(rows, right)
