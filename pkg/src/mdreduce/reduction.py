"""The ODP-to-SADP reduction: IT/VT instance builders, recovery, balance and compatibility."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BudgetOverflow, DegenerateInstance, GroundSizeMismatch, ProvenanceError
from .itemsets import EMPTY, as_itemset, full_set, members
from .matching import attains_max, max_weight_matching
from .solvers import brute_force_odp, optimal_gaps
from .transforms import item_truncate, scaled_disjoint_union, value_truncate
from .valuations import Valuation

IT = "IT"
VT = "VT"


@dataclass(frozen=True)
class SADPInstance:
    """``k`` valuations on ``(k - 1) * m`` items built from an ODP pair ``(v, w)``.

    ``parameter`` is the truncation parameter: ``m`` for item truncation,
    ``2 k v([m])`` for value truncation.
    """

    valuations: tuple[Valuation, ...]
    k: int
    source_v: Valuation
    source_w: Valuation
    construction: str
    parameter: int

    @property
    def m(self) -> int:
        return self.source_v.ground_size

    @property
    def ground_size(self) -> int:
        return self.valuations[0].ground_size

    def copy_items(self, i: int) -> range:
        """Global item indices of copy ``i`` (1-based)."""
        return range((i - 1) * self.m, i * self.m)

    def slice(self, s: Iterable[int], i: int) -> frozenset:
        """Copy ``i`` of ``s``, in base coordinates."""
        lo = (i - 1) * self.m
        return frozenset(e - lo for e in s if lo <= e < lo + self.m)

    def place(self, a: Iterable[int], i: int) -> frozenset:
        """Base set ``a`` placed in copy ``i``."""
        lo = (i - 1) * self.m
        return frozenset(lo + e for e in a)


def _check_pair(v: Valuation, w: Valuation, k: int) -> None:
    if v.ground_size != w.ground_size:
        raise GroundSizeMismatch("v and w must share a ground set")
    if k < 2:
        raise ValueError("k must be at least 2")


def build_IT(v: Valuation, w: Valuation, k: int) -> SADPInstance:
    """Scaled disjoint union of ``(v, w)``, each valuation item-truncated at ``m``."""
    _check_pair(v, w, k)
    m = v.ground_size
    vals = tuple(item_truncate(x, m) for x in scaled_disjoint_union(v, w, k))
    return SADPInstance(vals, k, v, w, IT, m)


def build_VT(v: Valuation, w: Valuation, k: int) -> SADPInstance:
    """Scaled disjoint union of ``(v, w)``, each valuation capped at ``2 k v([m])``."""
    _check_pair(v, w, k)
    cap = 2 * k * v.full_value()
    vals = tuple(value_truncate(x, cap) for x in scaled_disjoint_union(v, w, k))
    return SADPInstance(vals, k, v, w, VT, cap)


def _best_slice(inst: SADPInstance, candidates: Sequence[frozenset]) -> tuple[frozenset, int]:
    v, w = inst.source_v, inst.source_w
    best, best_val = EMPTY, 0
    for a in candidates:
        d = v._value(a) - w._value(a)
        if d > best_val or (d == best_val and members(a) < members(best)):
            best, best_val = a, d
    return best, best_val


def refine(vl: Valuation, s: frozenset, y: int) -> frozenset:
    """Shrink ``s`` to at most ``y`` items without lowering ``vl(s)``.

    Items are tried in ascending order and dropped whenever the value is
    unchanged without them.
    """
    if len(s) <= y:
        return s
    target = vl._value(s)
    cur = set(s)
    for i in sorted(s):
        if len(cur) <= y:
            break
        cur.discard(i)
        if vl._value(frozenset(cur)) != target:
            cur.add(i)
    return frozenset(cur)


def recover_from_IT(s: Iterable[int], inst: SADPInstance) -> tuple[frozenset, int]:
    """ODP answer from an SADP answer on an item-truncated instance.

    For each ``l < k`` the set is refined to at most ``m`` items preserving
    ``v_l``, and copy ``l`` of the refined set is a candidate.  The best
    candidate by ``v - w`` is returned, or the empty set if none is positive.
    """
    if inst.construction != IT:
        raise ProvenanceError(f"expected an IT instance, got {inst.construction}")
    s = as_itemset(s, inst.ground_size)
    cands = []
    for ell in range(1, inst.k):
        refined = refine(inst.valuations[ell - 1], s, inst.m)
        cands.append(inst.slice(refined, ell))
    return _best_slice(inst, cands)


def recover_from_VT(s: Iterable[int], inst: SADPInstance) -> tuple[frozenset, int]:
    """ODP answer from an SADP answer on a value-truncated instance: the best copy of ``s``."""
    if inst.construction != VT:
        raise ProvenanceError(f"expected a VT instance, got {inst.construction}")
    s = as_itemset(s, inst.ground_size)
    return _best_slice(inst, [inst.slice(s, ell) for ell in range(1, inst.k)])


def recover(s: Iterable[int], inst: SADPInstance) -> tuple[frozenset, int]:
    return recover_from_IT(s, inst) if inst.construction == IT else recover_from_VT(s, inst)


def balancedness(inst, cap: int | None = None, gaps: Sequence[int] | None = None) -> Fraction:
    """Smallest ``d`` with ``v_k(full ground) <= d * gap_l`` for every consecutive optimal gap."""
    vals = inst.valuations if hasattr(inst, "valuations") else inst
    if gaps is None:
        gaps = [g for g, _ in optimal_gaps(vals, cap)]
    low = min(gaps)
    if low <= 0:
        raise DegenerateInstance("some consecutive optimal gap is zero")
    return Fraction(vals[-1].full_value(), low)


# -- compatibility ---------------------------------------------------------------


@dataclass(frozen=True)
class CompatibilityWitness:
    allocations: tuple[frozenset, ...]
    multipliers: tuple[int, ...]
    C: int
    C1: int


@dataclass(frozen=True)
class CompatibilityResult:
    """``violation`` is ``None`` on success, ``"cyclic"`` for the full grid, or the 1-based ``(i, j)`` sub-grid."""

    ok: bool
    violation: object = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def ceil_k_log2(c1: int, k: int) -> int:
    """Exact ``ceil(k * log2(c1))``: the least ``C`` with ``2^C >= c1^k``."""
    target = c1**k
    c = max(target.bit_length() - 1, 0)
    while (1 << c) < target:
        c += 1
    return c


def witness_for_IT(v: Valuation, w: Valuation, k: int, cap: int | None = None) -> CompatibilityWitness:
    """Allocations and multipliers certifying C-compatibility of ``build_IT(v, w, k)``.

    ``X_l`` places ``A* = argmax(v - w)`` in copy ``l`` for ``l < k`` and
    ``X_k`` repeats copy ``k - 1``.  Multipliers are ``Q_i = (C1 + 1)^(i-1)``
    with ``C1 = 2k max(v([m]), w([m]))``.

    When ``w(A*) = 0`` (possible only if ``w`` has trivial items) the plain
    placement can break the shifted matchings because ``v_{l+1}(X_l)`` is 0.
    We then pad ``X_l`` (``l >= 2``) with one item ``b`` of positive ``w``
    value in copy ``l - 1``.  That copy is priced by ``w`` under both
    ``v_l`` and ``v_{l+1}``, so the gap stays optimal, while every shifted
    value becomes positive and strictly increasing along the chain.
    """
    _check_pair(v, w, k)
    m = v.ground_size
    a_star, _ = brute_force_odp(v, w, cap)
    c1 = 2 * k * max(v.full_value(), w.full_value())
    mults = tuple((c1 + 1) ** i for i in range(k))
    C = ceil_k_log2(c1, k)
    inst = SADPInstance((), k, v, w, IT, m)
    pad = None
    if w(a_star) == 0:
        pad = next((i for i in range(m) if i not in a_star and w(frozenset((i,))) > 0), None)
    if pad is None:
        xs = [inst.place(a_star, ell) for ell in range(1, k)] + [inst.place(a_star, k - 1)]
    else:
        b = frozenset((pad,))
        xs = [inst.place(a_star, 1)]
        xs += [inst.place(a_star, ell) | inst.place(b, ell - 1) for ell in range(2, k)]
        xs.append(inst.place(a_star | b, k - 1))
    return CompatibilityWitness(tuple(xs), mults, C, c1)


def check_compatibility(
    valuations: Sequence[Valuation],
    allocations: Sequence[frozenset],
    multipliers: Sequence[int] | None = None,
) -> CompatibilityResult:
    """Check both matching conditions on ``Q_j * v_j`` against allocations ``X``.

    The grid entry for allocation ``i`` and valuation ``j`` is
    ``Q_j * v_j(X_i)``.  The identity matching must be max-weight on the full
    grid, and for every ``i < j`` the matching ``X_l -> v_{l+1}`` must be
    max-weight on allocations ``X_i..X_{j-1}`` and valuations
    ``v_{i+1}..v_j``.  Ties count as success.
    """
    k = len(valuations)
    if len(allocations) != k:
        raise ValueError(f"{len(allocations)} allocations for {k} valuations")
    q = list(multipliers) if multipliers is not None else [1] * k
    grid = [[q[j] * valuations[j]._value(frozenset(x)) for j in range(k)] for x in allocations]
    if k <= 1:
        return CompatibilityResult(True)
    ident = [(i, i) for i in range(k)]
    if not attains_max(grid, ident):
        best = max_weight_matching(grid)
        return CompatibilityResult(False, "cyclic", f"identity below max-weight matching {best[0]}")
    for i in range(k):
        for j in range(i + 2, k + 1):
            # allocations i..j-2 (0-based) against valuations i+1..j-1
            sub = [[grid[a][b] for b in range(i + 1, j)] for a in range(i, j - 1)]
            diag = [(t, t) for t in range(j - 1 - i)]
            if not attains_max(sub, diag):
                return CompatibilityResult(False, (i + 1, j), "shifted matching is not max-weight")
    return CompatibilityResult(True)


def check_C_compatibility(inst, witness: CompatibilityWitness, cap: int | None = None) -> CompatibilityResult:
    """Full C-compatibility check: multiplier bounds, gap optimality of ``X_l`` for ``l < k``, and compatibility."""
    vals = inst.valuations if hasattr(inst, "valuations") else inst
    k = len(vals)
    q = witness.multipliers
    xs = witness.allocations
    if len(q) != k or len(xs) != k:
        return CompatibilityResult(False, "shape", "witness length differs from k")
    if q[0] != 1 or any(a >= b for a, b in zip(q, q[1:])):
        return CompatibilityResult(False, "multipliers", "need 1 = Q_1 < ... < Q_k")
    if q[-1] > 1 << witness.C:
        return CompatibilityResult(False, "multipliers", f"Q_k exceeds 2^{witness.C}")
    gaps = optimal_gaps(vals, cap)
    for ell, ((g, _), a, b) in enumerate(zip(gaps, vals, vals[1:]), start=1):
        x = frozenset(xs[ell - 1])
        if a._value(x) - b._value(x) != g:
            return CompatibilityResult(False, ("gap", ell), f"X_{ell} does not attain optimal gap {g}")
    return check_compatibility(vals, xs, q)


# -- reports and parameter bookkeeping --------------------------------------------


@dataclass(frozen=True)
class ReductionReport:
    balancedness: Fraction
    C: int
    gaps: tuple[int, ...]
    full_values: tuple[int, ...]


def reduction_report(inst: SADPInstance, witness: CompatibilityWitness | None = None, cap: int | None = None) -> ReductionReport:
    gaps = tuple(g for g, _ in optimal_gaps(inst.valuations, cap))
    d = balancedness(inst, cap, gaps)
    if witness is None and inst.construction == IT:
        witness = witness_for_IT(inst.source_v, inst.source_w, inst.k, cap)
    C = witness.C if witness is not None else 0
    return ReductionReport(d, C, gaps, tuple(vl.full_value() for vl in inst.valuations))


def quality_formula(alpha, d, k: int) -> Fraction:
    """``alpha - (1 - alpha) d / (k - 1)``, clamped at 0."""
    alpha, d = Fraction(alpha), Fraction(d)
    if k < 2:
        raise ValueError("k must be at least 2")
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    return max(Fraction(0), alpha - (1 - alpha) * d / (k - 1))


def hardness_bound(m: int, k: int, y: int | None = None) -> Fraction:
    """Approximation bound ``2my / (k - 1 + 2my)``; ``y`` defaults to ``m / 2``."""
    if k < 2 or m < 1:
        raise ValueError("need k >= 2 and m >= 1")
    two_my = m * m if y is None else 2 * m * y
    return Fraction(two_my, k - 1 + two_my)


@dataclass(frozen=True)
class HardnessBudget:
    k: int
    items: int
    support: int
    bound: Fraction


# k = m^(2/eps) gets huge quickly; beyond this many bits we refuse rather than truncate
BUDGET_BIT_LIMIT = 4096


def _ceil_root(n: int, p: int) -> int:
    """Least integer ``r`` with ``r^p >= n``."""
    if n <= 1:
        return n
    lo, hi = 1, 1 << (-(-n.bit_length() // p) + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**p >= n:
            hi = mid
        else:
            lo = mid + 1
    return lo


def hardness_budget(m: int, eps, k: int | None = None) -> HardnessBudget:
    """Parameters for ``m`` base items: ``k = ceil(m^(2/eps))`` unless ``k`` is given directly."""
    if m < 1:
        raise ValueError("m must be positive")
    if k is None:
        eps = Fraction(eps)
        if not 0 < eps < 1:
            raise ValueError("eps must lie strictly between 0 and 1")
        # m^(2/eps) = (m^(2q))^(1/p) for eps = p/q
        p, q = eps.numerator, eps.denominator
        if (2 * q) * max(m.bit_length(), 1) > BUDGET_BIT_LIMIT:
            raise BudgetOverflow(f"m^(2/eps) exceeds 2^{BUDGET_BIT_LIMIT} for m={m}, eps={eps}")
        k = max(_ceil_root(m ** (2 * q), p), 2)
    return HardnessBudget(k, (k - 1) * m, k, hardness_bound(m, k))
