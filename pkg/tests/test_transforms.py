from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdreduce import NotMatroidBased
from mdreduce.instances import APPENDIX_ITEMS, appendix_counterexample, boxs_family, random_matroid, random_matroid_valuation
from mdreduce.itemsets import from_mask
from mdreduce.matroids import Truncated, Uniform, direct_sum
from mdreduce.transforms import (
    disjoint_union,
    exhaustive_item_truncated_value,
    fast_truncated_value,
    item_truncate,
    scale,
    scaled_disjoint_union,
    value_truncate,
)
from mdreduce.valuations import Additive, CDemand, MatroidBased, check_properties, extensionally_equal, value_table


def letters(word):
    return frozenset(APPENDIX_ITEMS.index(c) for c in word)


def trunc_oracle(v, y, s):
    """Maximum over subsets of ``s`` of size at most ``y``, via the full value table."""
    tab = value_table(v)
    best = 0
    for mask in range(1 << v.ground_size):
        t = from_mask(mask)
        if t <= s and len(t) <= y:
            best = max(best, tab[mask])
    return best


def test_scale_examples():
    v = Additive([3, 5])
    assert extensionally_equal(scale(v, 1), v)
    assert extensionally_equal(scale(v, 2), Additive([6, 10]))
    assert scale(boxs_family(4).base, 3)(range(4)) == 6
    with pytest.raises(ValueError):
        scale(v, 0)


def test_disjoint_union_examples():
    z = disjoint_union(Additive([2]), Additive([7]))
    assert z(set()) == 0
    assert z({0, 1}) == 9
    assert extensionally_equal(disjoint_union(Additive([1, 2]), Additive([3])), Additive([1, 2, 3]))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 4))
def test_disjoint_union_of_matroid_based_is_direct_sum(seed, m1, m2):
    rng = random.Random(seed)
    a, b = random_matroid(rng, m1), random_matroid(rng, m2)
    wa = [rng.randint(1, 5) for _ in range(m1)]
    wb = [rng.randint(1, 5) for _ in range(m2)]
    z = disjoint_union(MatroidBased(a, wa), MatroidBased(b, wb))
    assert extensionally_equal(z, MatroidBased(direct_sum(a, b), wa + wb))


def test_item_truncate_examples():
    v = appendix_counterexample()
    assert extensionally_equal(item_truncate(v, 4), v)
    assert v(letters("abd")) == 10
    assert item_truncate(v, 2)(letters("abd")) == 9


@given(st.integers(0, 2**32 - 1), st.integers(1, 7), st.data())
def test_item_truncation_of_matroid_based_is_truncated_matroid(seed, m, data):
    rng = random.Random(seed)
    mat = random_matroid(rng, m)
    w = [rng.randint(1, 5) for _ in range(m)]
    y = data.draw(st.integers(0, m))
    v = MatroidBased(mat, w)
    assert extensionally_equal(item_truncate(v, y), MatroidBased(Truncated(y, mat), w))


def test_item_truncation_of_rank_is_rank():
    v = MatroidBased(Uniform(5, 4))
    t = item_truncate(v, 2)
    rep = check_properties(t)
    assert rep.submodular
    assert extensionally_equal(t, MatroidBased(Uniform(5, 2)))


def test_item_truncation_breaks_submodularity_of_table():
    t = item_truncate(appendix_counterexample(), 2)
    assert not check_properties(t).submodular
    assert t(letters("abcd")) - t(letters("abd")) == 1
    assert t(letters("abc")) - t(letters("ab")) == 0


def test_exhaustive_path_matches_oracle():
    v = appendix_counterexample()
    for y in range(5):
        for mask in range(16):
            s = from_mask(mask)
            assert exhaustive_item_truncated_value(v, y, s) == trunc_oracle(v, y, s)


def test_value_truncate_examples():
    v = appendix_counterexample()
    assert extensionally_equal(value_truncate(v, 10), v)
    assert all(x == 0 for x in value_table(value_truncate(v, 0)))
    assert value_truncate(v, 9)(letters("cd")) == 9


@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(0, 20))
def test_value_truncation_preserves_submodularity(seed, m, x):
    rng = random.Random(seed)
    v = random_matroid_valuation(rng, m)
    assert check_properties(value_truncate(v, x)).submodular


def test_scaled_disjoint_union_example():
    v, w = Additive([1]), CDemand(1, [1])
    vs = scaled_disjoint_union(v, w, 3)
    assert len(vs) == 3 and all(x.ground_size == 2 for x in vs)
    # copy 1 is valued by w (coefficient 4) and copy 2 by v (coefficient 5)
    assert vs[1]({0, 1}) == 4 * 1 + 5 * 1


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(2, 4))
def test_scaled_disjoint_union_formula(seed, m, k):
    rng = random.Random(seed)
    v = Additive([rng.randint(0, 5) for _ in range(m)])
    w = Additive([rng.randint(0, 5) for _ in range(m)])
    vs = scaled_disjoint_union(v, w, k)
    for mask in range(1 << ((k - 1) * m)):
        s = from_mask(mask)
        slices = [frozenset(e - (i - 1) * m for e in s if (i - 1) * m <= e < i * m) for i in range(1, k)]
        for ell in range(1, k + 1):
            expected = sum((k + i) * (v(slices[i - 1]) if i >= ell else w(slices[i - 1])) for i in range(1, k))
            assert vs[ell - 1](s) == expected
    # boundary cases: v_1 uses only v, v_k uses only w
    full = frozenset(range((k - 1) * m))
    assert vs[0](full) == sum(k + i for i in range(1, k)) * v(range(m))
    assert vs[-1](full) == sum(k + i for i in range(1, k)) * w(range(m))


def test_scaled_disjoint_union_errors():
    with pytest.raises(ValueError):
        scaled_disjoint_union(Additive([1]), Additive([1]), 1)


def test_fast_truncated_examples():
    v = w = MatroidBased(Uniform(2, 1), (2, 1))
    vls = [item_truncate(x, 2) for x in scaled_disjoint_union(v, w, 3)]
    for vl in vls:
        full = frozenset(range(4))
        assert fast_truncated_value(vl, full)[0] == trunc_oracle(vl.inner, 2, full)
        assert fast_truncated_value(vl, set()) == (0, 0)
        for mask in range(16):
            s = from_mask(mask)
            if len(s) <= 2:
                assert fast_truncated_value(vl, s)[0] == vl.inner(s)


def test_fast_truncated_rejects_other_classes():
    with pytest.raises(NotMatroidBased):
        fast_truncated_value(item_truncate(Additive([1, 2]), 1), {0})
    with pytest.raises(NotMatroidBased):
        fast_truncated_value(Additive([1]), {0})


@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2), (2, 3), (3, 2), (2, 4), (3, 3)]))
def test_fast_truncated_matches_exhaustive(seed, shape):
    m, k = shape
    rng = random.Random(seed)
    v, w = random_matroid_valuation(rng, m), random_matroid_valuation(rng, m)
    for x in scaled_disjoint_union(v, w, k):
        vl = item_truncate(x, m)
        for mask in range(1 << ((k - 1) * m)):
            s = from_mask(mask)
            got, queries = fast_truncated_value(vl, s)
            assert got == exhaustive_item_truncated_value(x, m, s)
            assert queries <= 3 * len(s)
