"""Exact desk-scale solvers: brute-force ODP/SADP and revenue-optimal lottery menus."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ._config import DEFAULT_MDMDP_CAP, check_cap
from .errors import DegenerateInstance, GroundSizeMismatch, SolverFault
from .itemsets import EMPTY, as_itemset, from_mask, full_set, members
from .lp import OPTIMAL, linprog_exact
from .valuations import TypeDistribution, Valuation, value_table


def brute_force_odp(v: Valuation, w: Valuation, cap: int | None = None) -> tuple[frozenset, int]:
    """Exact ``max_S v(S) - w(S)``; ties go to the lexicographically smallest member list.

    Since the empty set scores 0 and sorts first, it is returned whenever
    no set beats 0.
    """
    if v.ground_size != w.ground_size:
        raise GroundSizeMismatch("v and w must share a ground set")
    m = v.ground_size
    check_cap(m, cap)
    best, best_val, best_key = EMPTY, 0, ()
    for mask in range(1, 1 << m):
        s = from_mask(mask)
        d = v._value(s) - w._value(s)
        if d > best_val or (d == best_val and members(s) < best_key):
            best, best_val, best_key = s, d, members(s)
    return best, best_val


def optimal_gaps(valuations: Sequence[Valuation], cap: int | None = None) -> list[tuple[int, frozenset]]:
    """For each consecutive pair, ``(max_T v_l(T) - v_{l+1}(T), lexicographically smallest argmax)``."""
    n = valuations[0].ground_size
    check_cap(n, cap)
    tables = [value_table(v, cap) for v in valuations]
    out = []
    for a, b in zip(tables, tables[1:]):
        best, best_mask, best_key = None, 0, ()
        for mask in range(1 << n):
            d = a[mask] - b[mask]
            if best is None or d > best:
                best, best_mask, best_key = d, mask, members(from_mask(mask))
            elif d == best:
                key = members(from_mask(mask))
                if key < best_key:
                    best_mask, best_key = mask, key
        out.append((best, from_mask(best_mask)))
    return out


@dataclass(frozen=True)
class SADPEvaluation:
    """Per-pair quality of a candidate set; index ``j`` is 1-based like the pairs ``(v_j, v_{j+1})``."""

    numerators: tuple[int, ...]
    gaps: tuple[int, ...]
    ratios: tuple[Fraction, ...]
    best_index: int
    best_ratio: Fraction


def _valuations_of(inst) -> Sequence[Valuation]:
    return inst.valuations if hasattr(inst, "valuations") else inst


def sadp_eval(inst, s: Iterable[int], cap: int | None = None, gaps: Sequence[int] | None = None) -> SADPEvaluation:
    """Ratios ``(v_j(S) - v_{j+1}(S)) / max_T (v_j(T) - v_{j+1}(T))`` for every ``j``.

    ``gaps`` may be passed to reuse exhaustively computed denominators.
    """
    vals = _valuations_of(inst)
    s = as_itemset(s, vals[0].ground_size)
    if gaps is None:
        gaps = [g for g, _ in optimal_gaps(vals, cap)]
    nums = [a._value(s) - b._value(s) for a, b in zip(vals, vals[1:])]
    ratios = []
    for j, (num, g) in enumerate(zip(nums, gaps), start=1):
        if g <= 0:
            raise DegenerateInstance(f"optimal gap of pair {j} is {g}")
        ratios.append(Fraction(num, g))
    best = max(range(len(ratios)), key=lambda j: (ratios[j], -j))
    return SADPEvaluation(tuple(nums), tuple(gaps), tuple(ratios), best + 1, ratios[best])


def brute_force_sadp(inst, cap: int | None = None) -> tuple[frozenset, int]:
    """An exactly optimal SADP answer: the argmax set of the first pair, with its 1-based index."""
    gaps = optimal_gaps(_valuations_of(inst), cap)
    return gaps[0][1], 1


# -- mechanism design --------------------------------------------------------------


@dataclass(frozen=True)
class MenuEntry:
    lottery: tuple[tuple[frozenset, Fraction], ...]
    price: Fraction

    def __init__(self, lottery: Iterable[tuple[Iterable[int], object]], price):
        lot = {}
        for s, p in lottery:
            key = frozenset(s)
            lot[key] = lot.get(key, Fraction(0)) + Fraction(p)
        items = tuple(sorted(((s, p) for s, p in lot.items() if p != 0), key=lambda sp: members(sp[0])))
        object.__setattr__(self, "lottery", items)
        object.__setattr__(self, "price", Fraction(price))

    def expected_value(self, v: Valuation) -> Fraction:
        return sum((p * v._value(s) for s, p in self.lottery), Fraction(0))


@dataclass(frozen=True)
class Menu:
    """One (lottery, price) entry per type, aligned with the distribution; the null option is implicit."""

    entries: tuple[MenuEntry, ...]

    def __init__(self, entries: Iterable[MenuEntry]):
        object.__setattr__(self, "entries", tuple(entries))


@dataclass(frozen=True)
class MenuReport:
    ic_violation: Fraction
    ir_violation: Fraction
    lottery_violation: Fraction
    revenue: Fraction

    def ok(self, tol=0) -> bool:
        return max(self.ic_violation, self.ir_violation, self.lottery_violation) <= tol


def verify_menu(dist: TypeDistribution, menu: Menu) -> MenuReport:
    """Exact IC, IR and lottery-normalization residuals, plus expected revenue."""
    if len(menu.entries) != len(dist):
        raise ValueError(f"menu has {len(menu.entries)} entries for {len(dist)} types")
    ic = ir = lot = Fraction(0)
    revenue = Fraction(0)
    for (v, prob), own in zip(dist, menu.entries):
        u_own = own.expected_value(v) - own.price
        ir = max(ir, -u_own)
        for other in menu.entries:
            ic = max(ic, other.expected_value(v) - other.price - u_own)
        total = sum((p for _, p in own.lottery), Fraction(0))
        neg = min((p for _, p in own.lottery), default=Fraction(0))
        lot = max(lot, abs(total - 1), -neg)
        revenue += prob * own.price
    return MenuReport(ic, ir, lot, revenue)


def _menu_lp(dist: TypeDistribution):
    k = len(dist)
    m = dist.ground_size
    n_sets = 1 << m
    tables = [value_table(v) for v, _ in dist]
    n_vars = k * n_sets + k

    def pi(t, mask):
        return t * n_sets + mask

    def price(t):
        return k * n_sets + t

    c = [0] * n_vars
    for t, (_, p) in enumerate(dist):
        c[price(t)] = p
    a_eq, b_eq = [], []
    for t in range(k):
        row = [0] * n_vars
        for mask in range(n_sets):
            row[pi(t, mask)] = 1
        a_eq.append(row)
        b_eq.append(1)
    a_ub, b_ub = [], []
    for t in range(k):
        vt = tables[t]
        # IR: p_t - E[v_t(S_t)] <= 0
        row = [0] * n_vars
        for mask in range(n_sets):
            row[pi(t, mask)] = -vt[mask]
        row[price(t)] = 1
        a_ub.append(row)
        b_ub.append(0)
        for u in range(k):
            if u == t:
                continue
            # IC: (E[v_t(S_u)] - p_u) - (E[v_t(S_t)] - p_t) <= 0
            row = [0] * n_vars
            for mask in range(n_sets):
                row[pi(t, mask)] -= vt[mask]
                row[pi(u, mask)] += vt[mask]
            row[price(t)] += 1
            row[price(u)] -= 1
            a_ub.append(row)
            b_ub.append(0)
    return c, a_ub, b_ub, a_eq, b_eq, n_sets


def _menu_from_solution(dist, x, n_sets) -> Menu:
    k = len(dist)
    entries = []
    for t in range(k):
        lot = [(from_mask(mask), x[t * n_sets + mask]) for mask in range(n_sets) if x[t * n_sets + mask] > 0]
        entries.append(MenuEntry(lot, x[k * n_sets + t]))
    return Menu(entries)


def lp_optimal_mdmdp(dist: TypeDistribution, exact: bool = True, cap: int | None = None) -> tuple[Menu, Fraction]:
    """Revenue-optimal (lottery, price) menu by linear programming over all ``2^m`` bundles.

    Constraints are IC between every ordered pair of types, IR against the
    null option, lottery normalization and non-negative prices.  The exact
    path runs the rational simplex; ``exact=False`` uses HiGHS in double
    precision and converts the solution to fractions.
    """
    check_cap(dist.ground_size, cap, default=DEFAULT_MDMDP_CAP, what="MDMDP lottery support")
    c, a_ub, b_ub, a_eq, b_eq, n_sets = _menu_lp(dist)
    if exact:
        res = linprog_exact(c, a_ub, b_ub, a_eq, b_eq)
        if res.status != OPTIMAL:
            raise SolverFault(f"menu LP reported {res.status}; the null menu is always feasible")
        menu = _menu_from_solution(dist, res.x, n_sets)
        return menu, res.objective
    import numpy as np
    from scipy.optimize import linprog

    res = linprog(
        -np.array([float(x) for x in c]),
        A_ub=np.array(a_ub, dtype=float),
        b_ub=np.array(b_ub, dtype=float),
        A_eq=np.array(a_eq, dtype=float),
        b_eq=np.array(b_eq, dtype=float),
        bounds=[(0, None)] * len(c),
        method="highs",
    )
    if res.status != 0:
        raise SolverFault(f"menu LP failed: {res.message}")
    x = [Fraction(float(max(v, 0.0))) for v in res.x]
    menu = _menu_from_solution(dist, x, n_sets)
    return menu, verify_menu(dist, menu).revenue


def trivial_bundle_target(dist: TypeDistribution) -> tuple[int, Fraction]:
    """Index of the type maximizing ``Pr[v] * v(full)``, and that product."""
    full = full_set(dist.ground_size)
    scores = [p * v._value(full) for v, p in dist]
    best = max(range(len(scores)), key=lambda t: (scores[t], -t))
    return best, scores[best]


def trivial_bundle_menu(dist: TypeDistribution) -> tuple[Menu, Fraction]:
    """Sell only the grand bundle, priced at the target type's value for it.

    Every type valuing the bundle at least that much buys it, so the
    returned revenue is at least ``max_v Pr[v] * v(full)``.
    """
    full = full_set(dist.ground_size)
    t, _ = trivial_bundle_target(dist)
    price = Fraction(dist.entries[t][0]._value(full))
    entries = []
    for v, _ in dist:
        if v._value(full) >= price:
            entries.append(MenuEntry([(full, 1)], price))
        else:
            entries.append(MenuEntry([(EMPTY, 1)], 0))
    menu = Menu(entries)
    return menu, verify_menu(dist, menu).revenue
