from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdreduce import GroundSizeMismatch, MissingEntry
from mdreduce.instances import boxs_family, random_matroid, random_oxs
from mdreduce.itemsets import from_mask
from mdreduce.matroids import Uniform
from mdreduce.transforms import preprocess_trivial_items
from mdreduce.valuations import (
    OXS,
    Additive,
    CDemand,
    ExplicitTable,
    MatroidBased,
    SatPerturbed,
    TypeDistribution,
    check_properties,
    demand,
    extensionally_equal,
    to_explicit,
    value,
    value_table,
)


def oxs_brute(weights, s):
    """Oracle: best injective assignment of items in ``s`` to right nodes, partial allowed."""
    items = sorted(s)
    right = len(weights[0]) if weights else 0
    best = 0
    for r in range(min(len(items), right) + 1):
        for chosen in combinations(items, r):
            for nodes in permutations(range(right), r):
                best = max(best, sum(weights[i][j] for i, j in zip(chosen, nodes)))
    return best


def demand_brute(v, prices):
    """Oracle: maximal utility among all sets."""
    m = v.ground_size
    return max(v(from_mask(k)) - sum(Fraction(prices[i]) for i in from_mask(k)) for k in range(1 << m))


# -- value ---------------------------------------------------------------------


def test_value_examples():
    assert value(boxs_family(4).base, {0, 1, 2}) == 2
    assert value(Additive([3, 5]), set()) == 0
    assert value(MatroidBased(Uniform(4, 2), (5, 4, 3, 2)), {0, 2, 3}) == 8
    assert value(CDemand(2, [1, 7, 3, 5]), {0, 1, 2, 3}) == 12


def test_ground_mismatch_and_missing_entry():
    with pytest.raises(GroundSizeMismatch):
        value(Additive([1, 2]), {2})
    with pytest.raises(MissingEntry):
        ExplicitTable(2, {(): 0, (0,): 1})
    t = ExplicitTable(2, {(): 0, (0,): 1}, check=False)
    with pytest.raises(MissingEntry):
        t({1})


@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_oxs_matches_assignment_oracle(seed, m):
    rng = random.Random(seed)
    v = random_oxs(rng, m, right=rng.randint(1, 4), max_weight=5)
    for mask in range(1 << m):
        assert v(from_mask(mask)) == oxs_brute(v.weights, from_mask(mask))


@given(st.lists(st.integers(0, 9), min_size=1, max_size=7), st.integers(0, 8))
def test_cdemand_sums_c_largest(weights, c):
    v = CDemand(c, weights)
    for mask in range(1 << len(weights)):
        s = from_mask(mask)
        assert v(s) == sum(sorted((weights[i] for i in s), reverse=True)[:c])


def test_binary_flag():
    assert boxs_family(4).base.is_binary
    assert not OXS([[2]]).is_binary


# -- demand --------------------------------------------------------------------


def test_demand_examples():
    assert demand(boxs_family(4).base, [0] * 4) == frozenset(range(4))
    assert demand(MatroidBased(Uniform(2, 1), (5, 3)), [1, 4]) == frozenset({0})
    assert demand(Additive([3, 5]), [4, 2]) == frozenset({1})


def test_demand_errors():
    with pytest.raises(GroundSizeMismatch):
        demand(Additive([1, 2]), [1])
    with pytest.raises(ValueError):
        demand(Additive([1, 2]), [1, -1])


def test_demand_tie_rule():
    # {0} and {1} both give utility 1; the empty set gives 0
    assert demand(Additive([2, 2]), [1, 1]) == frozenset({0, 1})
    # utility 0 for every set: the largest set wins
    assert demand(Additive([1, 1]), [1, 1]) == frozenset({0, 1})
    # two singletons tie and their union is worse: lexicographically smallest
    v = MatroidBased(Uniform(2, 1), (3, 3))
    assert demand(v, [1, 1]) == frozenset({0})


@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.data())
def test_demand_is_optimal(seed, m, data):
    rng = random.Random(seed)
    v = MatroidBased(random_matroid(rng, m), [rng.randint(1, 6) for _ in range(m)])
    prices = data.draw(st.lists(st.fractions(0, 7, max_denominator=4), min_size=m, max_size=m))
    d = demand(v, prices)
    assert v(d) - sum(prices[i] for i in d) == demand_brute(v, prices)


def test_demand_optimal_at_twelve_items():
    rng = random.Random(12)
    v = random_oxs(rng, 12, right=4)
    prices = [Fraction(rng.randint(0, 6), 2) for _ in range(12)]
    d = demand(v, prices)
    assert v(d) - sum(prices[i] for i in d) == demand_brute(v, prices)


# -- properties ----------------------------------------------------------------


def test_properties_of_additive():
    rep = check_properties(Additive([3, 1, 4]))
    assert rep.normalized and rep.monotone and rep.submodular and rep.trivial_items == ()
    assert check_properties(Additive([3, 0])).trivial_items == (1,)


def test_properties_witnesses_are_genuine():
    # supermodular, non-monotone, non-normalized table
    t = ExplicitTable(2, {(): 1, (0,): 0, (1,): 2, (0, 1): 5})
    rep = check_properties(t)
    assert not rep.normalized
    assert not rep.monotone
    a, b = rep.monotone_witness
    assert a < b and t(a) > t(b)
    assert not rep.submodular
    x, y, z = rep.submodular_witness
    assert t(x | {y, z}) - t(x | {y}) > t(x | {z}) - t(x)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_matroid_valuations_are_submodular(seed, m):
    rng = random.Random(seed)
    v = MatroidBased(random_matroid(rng, m), [rng.randint(1, 5) for _ in range(m)])
    rep = check_properties(v)
    assert rep.normalized and rep.monotone and rep.submodular
    tab = value_table(v)
    # independent lattice form
    for a in range(1 << m):
        for b in range(1 << m):
            assert tab[a & b] + tab[a | b] <= tab[a] + tab[b]


# -- SAT perturbation ------------------------------------------------------------


def test_sat_unsatisfiable_is_base():
    base = boxs_family(6).base
    v = SatPerturbed(base, [[1], [-1]], 3)
    assert extensionally_equal(v, base)


def test_sat_literal_range():
    with pytest.raises(ValueError):
        SatPerturbed(boxs_family(4).base, [[3]], 2)


# -- distributions -------------------------------------------------------------


def test_distribution_validation():
    a, b = Additive([1]), Additive([2])
    with pytest.raises(ValueError, match="probabilities sum to 5/6"):
        TypeDistribution([(a, Fraction(1, 2)), (b, Fraction(1, 3))])
    with pytest.raises(ValueError):
        TypeDistribution([(a, 0), (b, 1)])
    with pytest.raises(GroundSizeMismatch):
        TypeDistribution([(a, Fraction(1, 2)), (Additive([1, 1]), Fraction(1, 2))])
    d = TypeDistribution([(a, "1/4"), (b, "3/4")])
    assert d.support == 2 and d.ground_size == 1


# -- trivial items -------------------------------------------------------------


def test_preprocess_examples():
    v = Additive([1, 2, 0])
    w = Additive([1, 1, 1])
    red = preprocess_trivial_items(v, w)
    assert red.v.ground_size == 2 and red.removed_for_v == frozenset({2})
    same = preprocess_trivial_items(w, w)
    assert same.removed_for_v == same.removed_for_w == frozenset()
    assert same.v is w
    both = preprocess_trivial_items(Additive([0, 1, 1]), Additive([1, 0, 1]))
    assert both.kept == (2,) and both.v.ground_size == both.w.ground_size == 1
    assert both.lift({0}) == frozenset({1, 2})


def test_to_explicit_round_trip():
    v = boxs_family(4).base
    assert extensionally_equal(to_explicit(v), v)
