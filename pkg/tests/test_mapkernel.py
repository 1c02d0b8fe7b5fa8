import pytest
from hypothesis import given, strategies as st

from orbitkit.mapkernel import (
    CAP_EXCEEDED,
    ENTERED_CYCLE,
    MapParam,
    conjugacy_negation_check,
    inverse_step,
    iterate,
    t_apply,
)
from oracles import T

valid_k = st.integers(-200, 200).filter(lambda k: abs(k) % 6 in (1, 5))
big_ints = st.integers(-(10**40), 10**40)


@pytest.mark.parametrize("k", [0, 2, 3, 6, -9, 12])
def test_rejects_invalid_k(k):
    with pytest.raises(ValueError):
        MapParam(k)


def test_rejects_bad_caps():
    with pytest.raises(ValueError):
        MapParam(1, max_steps=0)
    with pytest.raises(ValueError):
        MapParam(1, max_bits=7)


@pytest.mark.parametrize(
    "k, n, expected",
    [(1, 3, 5), (1, 6, 3), (-1, 5, 7), (5, 1, 4)],
)
def test_t_apply_examples(k, n, expected):
    assert t_apply(MapParam(k), n) == expected


@pytest.mark.parametrize(
    "k, n, expected",
    [(1, 2, {4, 1}), (1, 1, {2}), (1, 8, {16, 5}), (5, 1, {2, -1})],
)
def test_inverse_step_examples(k, n, expected):
    assert set(inverse_step(MapParam(k), n)) == expected


@given(valid_k, big_ints)
def test_t_apply_matches_reference(k, n):
    assert t_apply(MapParam(k), n) == T(k, n)


@given(valid_k, big_ints)
def test_inverse_round_trip(k, n):
    p = MapParam(k)
    for m in inverse_step(p, n):
        assert t_apply(p, m) == n


@given(valid_k, big_ints)
def test_inverse_is_complete(k, m):
    p = MapParam(k)
    assert m in inverse_step(p, t_apply(p, m))


def test_inverse_has_no_other_preimages():
    for k in (1, -1, 5, -7, 11):
        p = MapParam(k)
        pre = {}
        for m in range(-3000, 3001):
            pre.setdefault(t_apply(p, m), set()).add(m)
        for n in range(-500, 501):
            assert set(inverse_step(p, n)) == pre.get(n, set())


def test_iterate_hand_example():
    tr = iterate(MapParam(1), 3)
    assert tr.states == (3, 5, 8, 4, 2, 1, 2)
    assert tr.outcome == ENTERED_CYCLE
    assert tr.entry_index == 4
    assert set(tr.cycle) == {1, 2}


def test_iterate_k_minus_one_long_cycle():
    tr = iterate(MapParam(-1), 17)
    assert tr.resolved
    assert tr.cycle == (17, 25, 37, 55, 82, 41, 61, 91, 136, 68, 34)
    assert tr.cycle_id == 17


def test_iterate_step_cap():
    tr = iterate(MapParam(1, max_steps=1), 6)
    assert tr.outcome == CAP_EXCEEDED
    assert tr.states == (6, 3)
    assert tr.cycle_id is None


def test_iterate_bit_cap():
    tr = iterate(MapParam(1, max_bits=8), 255)
    assert tr.outcome == CAP_EXCEEDED
    assert tr.states[-1].bit_length() > 8


@given(valid_k, st.integers(-(10**6), 10**6))
def test_trajectory_invariants(k, n):
    p = MapParam(k, max_steps=2000)
    tr = iterate(p, n)
    assert tr.states[0] == n
    for a, b in zip(tr.states, tr.states[1:]):
        assert b == t_apply(p, a)
    if tr.resolved:
        assert tr.states[-1] == tr.states[tr.entry_index]
        assert len(set(tr.states[:-1])) == len(tr.states) - 1


@pytest.mark.parametrize("k, lo, hi", [(1, 1, 100), (5, 1, 100), (7, -50, 50)])
def test_conjugacy_examples(k, lo, hi):
    assert conjugacy_negation_check(k, lo, hi)


@given(valid_k, big_ints)
def test_conjugacy_fuzz(k, n):
    assert t_apply(MapParam(k), -n) == -t_apply(MapParam(-k), n)
