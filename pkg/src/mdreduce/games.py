"""Hidden-perturbation guessing games against value and demand oracles.

Each trial draws a perturbing set ``S`` uniformly, hands an algorithm oracle
access to ``v_S`` under a query budget, and records whether the algorithm
names ``S`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Protocol, Sequence

import numpy as np

from .errors import BudgetExceeded
from .instances import PerturbableFamily
from .itemsets import demand_key, from_mask, subset_unrank, to_mask
from .valuations import value_table

VALUE = "value"
DEMAND = "demand"


def theoretical_bound(s: int, x: int) -> Fraction:
    """Success-probability ceiling ``s/x + 1/(x - s)`` for budget ``s`` among ``x`` candidates."""
    if not 0 <= s < x:
        raise ValueError(f"need 0 <= s < x, got s={s}, x={x}")
    return Fraction(s, x) + Fraction(1, x - s)


# -- oracles ---------------------------------------------------------------------


class _Oracle:
    kind = ""

    def __init__(self, base: np.ndarray, m: int, hidden: frozenset, budget: int):
        self.m = m
        self.budget = budget
        self.queries = 0
        self._base = base
        self._hidden_mask = to_mask(hidden)
        self._table = base.copy()
        self._table[self._hidden_mask] -= 1

    def _spend(self) -> None:
        if self.queries >= self.budget:
            raise BudgetExceeded(f"query {self.queries + 1} exceeds budget {self.budget}")
        self.queries += 1


class ValueOracle(_Oracle):
    kind = VALUE

    def value(self, s) -> int:
        self._spend()
        mask = to_mask(s)
        out = int(self._table[mask])
        if out != self._base[mask]:
            assert mask == self._hidden_mask, "value response differs off the hidden set"
        return out


class DemandOracle(_Oracle):
    """Demand under ``v_S`` with the library tie rule (largest, then lexicographically smallest)."""

    kind = DEMAND

    def __init__(self, base, m, hidden, budget, order: np.ndarray, masks: np.ndarray):
        super().__init__(base, m, hidden, budget)
        self._order = order  # masks sorted by demand_key
        self._masks = masks  # 0/1 membership matrix, rows in _order
        self._vals = self._table[order]
        self._base_vals = base[order]

    def _argmax(self, vals: np.ndarray, prices: Sequence) -> frozenset:
        fr = [Fraction(p) for p in prices]
        if any(p < 0 for p in fr):
            raise ValueError("prices must be non-negative")
        scale = math.lcm(*(p.denominator for p in fr)) if fr else 1
        ints = np.array([int(p * scale) for p in fr], dtype=object if scale > 1 << 40 else np.int64)
        util = vals.astype(ints.dtype) * scale - self._masks.astype(ints.dtype) @ ints
        return from_mask(int(self._order[int(np.argmax(util))]))

    def demand(self, prices: Sequence) -> frozenset:
        if len(prices) != self.m:
            raise ValueError(f"{len(prices)} prices for {self.m} items")
        self._spend()
        out = self._argmax(self._vals, prices)
        base_out = self._argmax(self._base_vals, prices)
        if out != base_out:
            assert to_mask(base_out) == self._hidden_mask, "demand changed although the hidden set was not demanded"
        return out


class OracleAlgorithm(Protocol):
    name: str

    def __call__(self, oracle, fam: PerturbableFamily, budget: int, rng: np.random.Generator) -> frozenset: ...


# -- built-in algorithms --------------------------------------------------------


def _probe(oracle, fam: PerturbableFamily, cand: frozenset) -> bool:
    """One query deciding whether ``cand`` is the hidden set."""
    if oracle.kind == VALUE:
        return oracle.value(cand) < fam.base(cand)
    # cheap inside cand, expensive outside: base demands exactly cand, v_cand does not
    prices = [Fraction(1, 2) if i in cand else Fraction(2) for i in range(fam.m)]
    return oracle.demand(prices) != cand


@dataclass(frozen=True)
class ZeroQueryGuesser:
    """Asks nothing and names the first set in lexicographic order."""

    name: str = "zero-query"

    def __call__(self, oracle, fam, budget, rng):
        return subset_unrank(fam.m, 1)


@dataclass(frozen=True)
class RandomProber:
    """Probes distinct random candidates one query each, then guesses among the rest."""

    name: str = "random-prober"

    def __call__(self, oracle, fam, budget, rng):
        order = rng.permutation(fam.x) + 1
        for idx in order[: min(budget, fam.x)]:
            cand = subset_unrank(fam.m, int(idx))
            if _probe(oracle, fam, cand):
                return cand
        rest = order[min(budget, fam.x):]
        return subset_unrank(fam.m, int(rest[0])) if len(rest) else frozenset()


@dataclass(frozen=True)
class ExhaustiveScanner:
    """Probes candidates in rank order until found or out of budget, then names the next one."""

    name: str = "exhaustive"

    def __call__(self, oracle, fam, budget, rng):
        n = min(budget, fam.x)
        for idx in range(1, n + 1):
            cand = subset_unrank(fam.m, idx)
            if _probe(oracle, fam, cand):
                return cand
        return subset_unrank(fam.m, n + 1) if n < fam.x else frozenset()


BUILTIN_ALGORITHMS: dict[str, Callable[[], OracleAlgorithm]] = {
    "zero-query": ZeroQueryGuesser,
    "random-prober": RandomProber,
    "exhaustive": ExhaustiveScanner,
}


# -- harness ---------------------------------------------------------------------


@dataclass(frozen=True)
class GameTranscript:
    game: str
    algorithm: str
    m: int
    x: int
    budget: int
    trials: int
    successes: int
    query_counts: tuple[int, ...]
    hidden_indices: tuple[int, ...]
    seed: int
    bound: Fraction | None
    voided: tuple[int, ...] = field(default=())

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials

    def sigma(self, p: float) -> float:
        """Binomial standard deviation of the empirical rate at true rate ``p``."""
        return math.sqrt(p * (1 - p) / self.trials)


def _run(kind: str, alg: OracleAlgorithm, fam: PerturbableFamily, s: int, trials: int, seed: int) -> GameTranscript:
    if trials < 1:
        raise ValueError("trials must be positive")
    if s < 0:
        raise ValueError("budget must be non-negative")
    m = fam.m
    base = np.array(value_table(fam.base, cap=max(m, 16)), dtype=np.int64)
    if kind == DEMAND:
        order = np.array(sorted(range(1 << m), key=lambda k: demand_key(from_mask(k))), dtype=np.int64)
        masks = ((order[:, None] >> np.arange(m)) & 1).astype(np.int64)
    successes = 0
    counts, hidden_idx, voided = [], [], []
    for t, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        hid_ss, alg_ss = child.spawn(2)
        idx = int(np.random.default_rng(hid_ss).integers(fam.x)) + 1
        hidden = subset_unrank(m, idx)
        if kind == VALUE:
            oracle = ValueOracle(base, m, hidden, s)
        else:
            oracle = DemandOracle(base, m, hidden, s, order, masks)
        try:
            guess = alg(oracle, fam, s, np.random.default_rng(alg_ss))
        except BudgetExceeded:
            voided.append(t)
            guess = None
        counts.append(oracle.queries)
        hidden_idx.append(idx)
        successes += guess == hidden
    bound = theoretical_bound(s, fam.x) if s < fam.x else None
    return GameTranscript(kind, alg.name, m, fam.x, s, trials, successes, tuple(counts), tuple(hidden_idx), seed, bound, tuple(voided))


def run_value_game(alg: OracleAlgorithm, fam: PerturbableFamily, s: int, trials: int, seed: int) -> GameTranscript:
    return _run(VALUE, alg, fam, s, trials, seed)


def run_demand_game(alg: OracleAlgorithm, fam: PerturbableFamily, s: int, trials: int, seed: int) -> GameTranscript:
    return _run(DEMAND, alg, fam, s, trials, seed)
