import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from orbitkit.genfun import (
    RationalSeries,
    _divmod,
    _mul,
    affine_class_table,
    backward_gf_window,
    forward_gf,
    iterate_gf,
    one_minus_power,
    verify_pole_structure,
)
from orbitkit.mapkernel import MapParam
from oracles import T, forward, iterate_m, reaches


def test_iterate_gf_k1_m1():
    g = iterate_gf(MapParam(1), 1)
    assert g.numerator == (0, 2, 1, 1)
    assert g.den_pow == (2, 2)
    assert g.to_json() == {"num": ["0", "2", "1", "1"], "den_pow": {"P": 2, "e": 2}}


def test_iterate_gf_identity():
    g = iterate_gf(MapParam(1), 0)
    assert g.numerator == (0, 1) and g.den_pow == (1, 2)
    assert g.series(20) == list(range(20))


def test_iterate_gf_k_minus_1():
    g = iterate_gf(MapParam(-1), 1)
    assert g.series(6)[5] == 7


@pytest.mark.parametrize("k", [1, -1, 5, -5, 7, 11])
@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_iterate_gf_oracle(k, m):
    g = iterate_gf(MapParam(k), m)
    assert g.series(700) == [iterate_m(k, n, m) for n in range(700)]
    assert verify_pole_structure(g, m)


def test_pole_check_rejects_triple_pole():
    g = RationalSeries((1,), tuple(one_minus_power(1, 3)))
    assert not verify_pole_structure(g, 1)
    assert verify_pole_structure(iterate_gf(MapParam(1), 2), 2)


@pytest.mark.parametrize("k", [1, -1, 5])
def test_affine_class_law(k):
    p = MapParam(k)
    rng = random.Random(0)
    for m in (1, 3, 6, 8):
        table = affine_class_table(p, m)
        for a in rng.sample(range(1 << m), min(32, 1 << m)):
            for j in (0, 1, 2, 5):
                n = a + j * (1 << m)
                assert table.predict(n) == iterate_m(k, n, m)


def test_iterate_gf_budget():
    with pytest.raises(ValueError):
        iterate_gf(MapParam(1), 10, max_classes=512)
    with pytest.raises(ValueError):
        iterate_gf(MapParam(1), -1)


def test_reduction_keeps_coefficients():
    num = _mul([1, 1], [3, 0, 2])  # shares the factor (1 + z) with 1 - z^2
    unreduced = RationalSeries(tuple(num), tuple(one_minus_power(2, 1)))
    reduced = RationalSeries.structured(num, 2, 1)
    assert reduced.denominator == (1, -1) and reduced.den_pow == (1, 1)
    assert reduced.numerator == (3, 0, 2)
    assert reduced.series(50) == unreduced.series(50)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=8), st.integers(1, 4), st.integers(1, 2))
def test_reduction_is_sound(num, P, e):
    raw = RationalSeries(tuple(num), tuple(one_minus_power(P, e)))
    red = RationalSeries.structured(num, P, e)
    assert red.series(40) == raw.series(40)
    q, r = _divmod(one_minus_power(P, e), list(red.denominator))
    assert not r


def test_forward_gf_examples():
    h = forward_gf(MapParam(-1), 5)
    assert h.numerator == (5, 7, 10) and h.den_pow == (3, 1)
    h = forward_gf(MapParam(1), 1)
    assert h.numerator == (1, 2) and h.den_pow == (2, 1)
    h = forward_gf(MapParam(1), 3)
    # 3 + 5w + 8w^2 + 4w^3 + w^4 (2 + w) / (1 - w^2), over a common denominator
    assert h.numerator == (3, 5, 5, -1, -6, -3) and h.den_pow == (2, 1)


@pytest.mark.parametrize("k, n", [(1, 3), (-1, 5), (1, 27), (-1, 17), (5, 7), (-7, 40), (1, 0)])
def test_forward_gf_oracle(k, n):
    h = forward_gf(MapParam(k), n)
    expected = []
    x = n
    for _ in range(64):
        expected.append(x)
        x = T(k, x)
    assert h.series(64) == expected


def test_forward_gf_unresolved():
    assert forward_gf(MapParam(1, max_steps=5), 27) is None


def test_json_round_trip():
    for g in (iterate_gf(MapParam(5), 3), RationalSeries.structured([1, 1], 2, 1)):
        d = json.loads(json.dumps(g.to_json()))
        assert RationalSeries.from_json(d).series(100) == g.series(100)


def test_backward_window_examples():
    w = backward_gf_window(MapParam(1), 3, 20)
    assert [n for n in range(1, 21) if w.bit(n)] == [3, 6, 12]
    assert w.exact
    w = backward_gf_window(MapParam(1), 1, 20)
    assert all(w.bits) and w.exact
    with pytest.raises(ValueError):
        backward_gf_window(MapParam(-1), 0, 20)


@pytest.mark.parametrize("m, missing", [(1, set()), (2, set()), (4, {1, 2}), (8, {1, 2, 4})])
def test_conditional_structure_window(m, missing):
    # for k = 1 every positive start reaches the cycle {1, 2}, so O^-(2^j)
    # misses exactly the smaller powers of two outside the cycle
    w = backward_gf_window(MapParam(1), m, 1000)
    assert w.exact
    assert {n for n in range(1, 1001) if not w.bit(n)} == missing


@pytest.mark.parametrize("k, m", [(-1, 5), (-1, 7), (-1, 3), (5, 19), (1, 3), (1, 10)])
def test_backward_window_oracle(k, m):
    w = backward_gf_window(MapParam(k), m, 500)
    top = min(w.hi, w.exact_below - 1)
    assert top >= 100
    assert [w.bit(n) for n in range(1, top + 1)] == [int(reaches(k, n, m)) for n in range(1, top + 1)]
