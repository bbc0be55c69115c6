from __future__ import annotations

import random
from itertools import combinations
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdreduce.instances import (
    APPENDIX_ITEMS,
    appendix_counterexample,
    boxs_family,
    perturb,
    pointwise_perturbation,
    random_matroid,
    random_oxs,
    sat_perturbed_valuation,
)
from mdreduce.itemsets import from_mask, subset_unrank
from mdreduce.matroids import verify_axioms
from mdreduce.valuations import check_properties, extensionally_equal, value_table


def test_boxs_parameters():
    f4 = boxs_family(4)
    assert (f4.base({0}), f4.base(range(4)), f4.x, f4.y) == (1, 2, 6, 2)
    f2 = boxs_family(2)
    assert (f2.x, f2.y) == (2, 1)
    assert boxs_family(8).x == 70
    with pytest.raises(ValueError):
        boxs_family(3)
    with pytest.raises(ValueError):
        boxs_family(0)


@pytest.mark.parametrize("m", [2, 4, 6])
def test_boxs_base_properties(m):
    rep = check_properties(boxs_family(m).base)
    assert rep.normalized and rep.monotone and rep.submodular and rep.trivial_items == ()
    assert boxs_family(m).base.is_binary


def test_perturb_examples():
    fam = boxs_family(4)
    v = perturb(fam, {0, 1})
    assert v.is_binary
    assert v({0, 1}) == 1
    assert v({0, 1, 2}) == 2
    for mask in range(16):
        t = from_mask(mask)
        if len(t) < 2:
            assert v(t) == fam.base(t)


def test_perturb_rejects_wrong_size():
    with pytest.raises(ValueError):
        perturb(boxs_family(4), {0})


def test_perturbing_sets_enumeration():
    fam = boxs_family(6)
    sets = list(fam.perturbing_sets())
    assert len(sets) == fam.x == comb(6, 3)


@pytest.mark.parametrize("m", [2, 4, 6])
def test_graph_and_pointwise_agree(m):
    fam = boxs_family(m)
    for s in fam.perturbing_sets():
        assert extensionally_equal(perturb(fam, s), pointwise_perturbation(fam, s))


def test_sat_example_two_units():
    fam = boxs_family(4)
    v = sat_perturbed_valuation(fam, [[1], [2]], 2)
    perturbed = [c for c in combinations(range(4), 2) if v(c) != fam.base(c)]
    # assignment 11 (binary) is rank 4, the pair {1, 2}
    assert perturbed == [(1, 2)] and subset_unrank(4, 4) == frozenset({1, 2})
    assert extensionally_equal(v, perturb(fam, {1, 2}))


def test_sat_unsatisfiable_and_bounds():
    fam = boxs_family(4)
    assert extensionally_equal(sat_perturbed_valuation(fam, [[1], [-1]], 2), fam.base)
    with pytest.raises(ValueError):
        sat_perturbed_valuation(fam, [[1]], 3)


@given(st.integers(0, 7))
def test_unique_sat_is_a_legal_perturbation(assignment):
    # a CNF of unit clauses has exactly one model
    fam = boxs_family(6)
    cnf = [[j + 1] if assignment >> j & 1 else [-(j + 1)] for j in range(3)]
    v = sat_perturbed_valuation(fam, cnf, 3)
    s = subset_unrank(6, assignment + 1)
    assert extensionally_equal(v, perturb(fam, s))


def test_appendix_table():
    v = appendix_counterexample()
    idx = {c: i for i, c in enumerate(APPENDIX_ITEMS)}
    assert v({idx["c"], idx["d"]}) == 10
    assert v({idx["a"], idx["b"], idx["c"]}) == 9
    assert v({idx["a"]}) == 5
    rep = check_properties(v)
    assert rep.monotone and rep.submodular


@given(st.integers(0, 2**32 - 1), st.integers(1, 7), st.booleans())
def test_random_matroids_are_matroids(seed, m, loopless):
    mat = random_matroid(random.Random(seed), m, loopless)
    assert verify_axioms(mat)
    if loopless:
        assert all(mat.is_independent({i}) for i in range(m))


@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_random_oxs_has_no_trivial_items(seed, m):
    v = random_oxs(random.Random(seed), m)
    assert check_properties(v).trivial_items == ()
    assert value_table(v)[0] == 0
