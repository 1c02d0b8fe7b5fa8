import random

import pytest
from hypothesis import given, settings, strategies as st

from orbitkit.inverse import (
    Relation,
    enumerate_backward,
    fabry_case_check,
    partition_refine,
    refine_step,
    trichotomy,
)
from orbitkit.mapkernel import MapParam, t_apply
from oracles import forward, reaches


def test_multiple_of_three_orbit_is_a_doubling_chain():
    s = enumerate_backward(MapParam(1), 3, 100)
    assert s.positive_members == (3, 6, 12, 24, 48, 96)
    assert s.negative_members == ()
    assert s.exact


def test_both_preimages_present():
    s = enumerate_backward(MapParam(1), 8, 40)
    assert {16, 5} <= s.members


def test_mixed_sign_orbit_for_k5():
    s = enumerate_backward(MapParam(5), 1, 20)
    assert {-1, -2, -4, -8, -16} <= set(s.negative_members)


@pytest.mark.parametrize("k, m, cap", [(1, 1, 300), (1, 5, 500), (-1, 17, 400), (5, 1, 200), (-7, 3, 200), (11, -4, 300)])
def test_sample_is_exact_against_forward_oracle(k, m, cap):
    s = enumerate_backward(MapParam(k), m, cap)
    assert s.exact
    expected = {x for x in range(-cap, cap + 1) if x and reaches(k, x, m)}
    assert s.members == expected


def test_member_hidden_behind_an_excursion_is_found():
    # 27 climbs to 4616 before reaching 1, far above the cap
    s = enumerate_backward(MapParam(1), 1, 100)
    assert 27 in s.members
    assert s.contains(27) is True


def test_node_cap_shrinks_watermark():
    full = enumerate_backward(MapParam(1), 1, 1000)
    tight = enumerate_backward(MapParam(1), 1, 1000, node_cap=200)
    assert full.exact
    assert tight.frontier_exhausted_below <= 101
    assert tight.contains(999) is None
    below = {x for x in full.members if abs(x) < tight.frontier_exhausted_below}
    assert below <= tight.members


def test_step_cap_shrinks_watermark():
    s = enumerate_backward(MapParam(1, max_steps=20), 1, 100)
    assert not s.exact
    assert s.contains(27) is None


@pytest.mark.parametrize("k, m", [(1, 7), (-1, 5), (5, 1), (-5, 2)])
def test_sample_structure(k, m):
    p = MapParam(k)
    cap = 2000
    s = enumerate_backward(p, m, cap)
    members = s.members
    x = m
    while abs(x) <= cap:
        assert x in members
        x *= 2
    for x in members:
        if x != m:
            y = t_apply(p, x)
            assert y in members or abs(y) > cap or abs(y) >= s.frontier_exhausted_below


def test_zero_orbit_is_degenerate():
    s = enumerate_backward(MapParam(1), 0, 10)
    assert s.members == frozenset() and s.root == 0


@pytest.mark.parametrize(
    "k, m1, m2, rel",
    [
        (1, 5, 16, Relation.DISJOINT),
        (1, 3, 5, Relation.NESTED_FIRST_IN_SECOND),
        (1, 5, 3, Relation.NESTED_SECOND_IN_FIRST),
        (-1, 1, 5, Relation.DISJOINT),
        (-1, 5, 17, Relation.DISJOINT),
        (1, 1, 2, Relation.EQUAL),
    ],
)
def test_trichotomy_examples(k, m1, m2, rel):
    assert trichotomy(MapParam(k), m1, m2).relation == rel


def test_trichotomy_unresolved_under_caps():
    v = trichotomy(MapParam(1, max_steps=10), 27, 5)
    assert v.relation == Relation.UNRESOLVED


def test_trichotomy_equal_roots():
    assert trichotomy(MapParam(1), 4, 4).relation == Relation.EQUAL


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([1, -1, 5, 7]), st.integers(1, 400), st.integers(1, 400))
def test_trichotomy_against_backward_samples(k, m1, m2):
    if m1 == m2:
        return
    p = MapParam(k)
    v = trichotomy(p, m1, m2)
    a = enumerate_backward(p, m1, 400).members
    b = enumerate_backward(p, m2, 400).members
    if v.relation == Relation.DISJOINT:
        assert not a & b
    elif v.relation == Relation.NESTED_FIRST_IN_SECOND:
        assert a <= b
    elif v.relation == Relation.NESTED_SECOND_IN_FIRST:
        assert b <= a
    elif v.relation == Relation.EQUAL:
        assert a == b


def test_fabry_examples():
    assert fabry_case_check(MapParam(1), 3, 10**6)
    assert fabry_case_check(MapParam(-1), 9, 10**4)
    with pytest.raises(ValueError):
        fabry_case_check(MapParam(1), 5, 100)


@pytest.mark.parametrize(
    "k, roots, expected",
    [(1, [16], [32]), (1, [8], [16, 5]), (-1, [1], [2])],
)
def test_refine_examples(k, roots, expected):
    assert partition_refine(MapParam(k), roots) == expected


def test_refine_cycle_root_keeps_union():
    # for k=1 the root 1 sits on the 2-cycle {1, 2}
    assert refine_step(MapParam(1), 1) == ((4,), (1, 2))


@pytest.mark.parametrize("k, roots, index", [(1, [8], 0), (1, [16, 5], 1), (-1, [1, 5, 17], 1), (1, [1], 0), (-1, [17], 0), (5, [7], 0)])
def test_refine_preserves_union(k, roots, index):
    p = MapParam(k)
    cap = 1500

    def union(rs):
        out = set()
        for r in rs:
            out |= enumerate_backward(p, r, cap).members
        return out

    _, removed = refine_step(p, roots[index])
    assert union(partition_refine(p, roots, index)) | set(removed) == union(roots)


def test_refine_rejects_overlapping_roots():
    with pytest.raises(ValueError):
        partition_refine(MapParam(1), [8, 16])
    with pytest.raises(ValueError):
        partition_refine(MapParam(1, max_steps=10), [27, 6])
