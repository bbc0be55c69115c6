from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdreduce import DegenerateInstance, EnumerationCapExceeded
from mdreduce.instances import boxs_family, perturb, random_matroid_valuation, random_oxs
from mdreduce.itemsets import from_mask
from mdreduce.reduction import build_IT
from mdreduce.solvers import (
    Menu,
    MenuEntry,
    brute_force_odp,
    brute_force_sadp,
    lp_optimal_mdmdp,
    optimal_gaps,
    sadp_eval,
    trivial_bundle_menu,
    trivial_bundle_target,
    verify_menu,
)
from mdreduce.valuations import Additive, TypeDistribution

from instance_suite import random_distribution


# -- ODP -------------------------------------------------------------------------


def test_odp_examples():
    v = Additive([3, 1])
    assert brute_force_odp(v, v) == (frozenset(), 0)
    fam = boxs_family(4)
    s, val = brute_force_odp(fam.base, perturb(fam, {0, 1}))
    assert (s, val) == (frozenset({0, 1}), 1)
    w = perturb(fam, {0, 1})
    assert [t for t in map(from_mask, range(16)) if fam.base(t) - w(t) == 1] == [frozenset({0, 1})]
    assert brute_force_odp(Additive([5, 1]), Additive([1, 5])) == (frozenset({0}), 4)


def test_odp_cap():
    with pytest.raises(EnumerationCapExceeded):
        brute_force_odp(Additive([1] * 5), Additive([1] * 5), cap=4)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_odp_dominates_every_set(seed, m):
    rng = random.Random(seed)
    v, w = random_oxs(rng, m), random_matroid_valuation(rng, m)
    s, best = brute_force_odp(v, w)
    assert best == v(s) - w(s) >= 0
    for mask in range(1 << m):
        t = from_mask(mask)
        assert best >= v(t) - w(t)


def test_odp_dominates_at_ten_items():
    rng = random.Random(10)
    v, w = random_oxs(rng, 10, right=3), random_oxs(rng, 10, right=3)
    _, best = brute_force_odp(v, w)
    assert all(best >= v(from_mask(k)) - w(from_mask(k)) for k in range(1 << 10))


# -- SADP ------------------------------------------------------------------------


def test_sadp_eval_examples():
    fam = boxs_family(2)
    inst = build_IT(fam.base, perturb(fam, {0}), 3)
    s, j = brute_force_sadp(inst)
    assert sadp_eval(inst, s).best_ratio == 1
    empty = sadp_eval(inst, set())
    assert empty.numerators == (0, 0) and empty.best_ratio == 0
    full = sadp_eval(inst, range(4))
    tabs = [[vl(from_mask(k)) for k in range(16)] for vl in inst.valuations]
    gaps = [max(a[k] - b[k] for k in range(16)) for a, b in zip(tabs, tabs[1:])]
    assert full.gaps == tuple(gaps)
    assert full.ratios == tuple(Fraction(a[15] - b[15], g) for a, b, g in zip(tabs, tabs[1:], gaps))


def test_sadp_degenerate_gap():
    v = Additive([1, 1])
    with pytest.raises(DegenerateInstance):
        sadp_eval([v, v], {0})


def test_optimal_gaps_are_maxima():
    vals = [Additive([3, 1]), Additive([1, 2]), Additive([0, 0])]
    gaps = optimal_gaps(vals)
    assert gaps[0] == (2, frozenset({0}))
    assert gaps[1] == (3, frozenset({0, 1}))


# -- mechanism design ----------------------------------------------------------------


def posted_price(dist):
    vals = [(v.weights[0], p) for v, p in dist]
    return max(price * sum(p for x, p in vals if x >= price) for price, _ in vals)


def test_single_type_sells_full_bundle():
    v = Additive([2, 3])
    dist = TypeDistribution([(v, 1)])
    menu, rev = lp_optimal_mdmdp(dist)
    assert rev == 5
    assert menu.entries[0].price == 5 and menu.entries[0].expected_value(v) == 5
    assert trivial_bundle_menu(dist)[1] == rev


def test_two_type_single_item():
    dist = TypeDistribution([(Additive([1]), Fraction(1, 2)), (Additive([2]), Fraction(1, 2))])
    assert lp_optimal_mdmdp(dist)[1] == 1 == posted_price(dist)


def test_identical_types_trivial_is_optimal():
    v = Additive([1, 2, 3])
    dist = TypeDistribution([(v, Fraction(1, 3))] * 3)
    _, triv = trivial_bundle_menu(dist)
    assert triv == 6 == lp_optimal_mdmdp(dist)[1]


def test_trivial_bundle_target_and_revenue():
    dist = TypeDistribution([(Additive([10]), Fraction(1, 10)), (Additive([3]), Fraction(9, 10))])
    assert trivial_bundle_target(dist) == (1, Fraction(27, 10))
    menu, rev = trivial_bundle_menu(dist)
    # the high type also buys at price 3
    assert rev == 3
    assert verify_menu(dist, menu).ok(0)


def test_verify_menu_reports_overcharge():
    dist = TypeDistribution([(Additive([2]), 1)])
    rep = verify_menu(dist, Menu([MenuEntry([({0}, 1)], 5)]))
    assert rep.ir_violation == 3 and not rep.ok()
    rep = verify_menu(dist, Menu([MenuEntry([({0}, Fraction(1, 2))], 0)]))
    assert rep.lottery_violation == Fraction(1, 2)


def test_menu_entry_canonical():
    a = MenuEntry([({1}, Fraction(1, 4)), ({0}, Fraction(1, 2)), ({1}, Fraction(1, 4)), (set(), 0)], 1)
    b = MenuEntry([({0}, Fraction(2, 4)), ({1}, Fraction(1, 2))], 1)
    assert a == b


def test_mdmdp_cap():
    dist = TypeDistribution([(Additive([1] * 4), 1)])
    with pytest.raises(EnumerationCapExceeded):
        lp_optimal_mdmdp(dist, cap=3)


@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_single_item_lp_equals_posted_price(seed, support):
    dist = random_distribution(random.Random(seed), m=1, support=support, max_weight=9)
    assert lp_optimal_mdmdp(dist)[1] == posted_price(dist)


@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(1, 4))
def test_lp_menu_is_feasible_and_bounded_by_trivial(seed, m, support):
    dist = random_distribution(random.Random(seed), m=m, support=support)
    menu, rev = lp_optimal_mdmdp(dist)
    rep = verify_menu(dist, menu)
    assert rep.ok(0) and rep.revenue == rev
    _, triv = trivial_bundle_menu(dist)
    assert rev >= triv >= rev / len(dist)
    fmenu, frev = lp_optimal_mdmdp(dist, exact=False)
    assert verify_menu(dist, fmenu).ok(Fraction(1, 10**9))
    assert abs(frev - rev) <= Fraction(1, 10**6) * max(rev, 1)
