import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linematch.pseudo import (BadIndices, BothInfinite, PseudoMetric, direction_probs,
                              harmonic_probs, neighbor_probs, next_exponent, pseudo_distance,
                              z_value)
from oracles import naive_pd


def test_gap_cases():
    assert pseudo_distance([0, 7], 0, 1, 10, 4) == 7
    assert pseudo_distance([0, 12], 0, 1, 10, 4) == math.inf
    assert pseudo_distance([0, 0.5], 0, 1, 100, 10) == 1.0
    assert pseudo_distance([0, 4, 11, 31], 0, 2, 100, 4) == Fraction(25, 4) + 7
    assert pseudo_distance([0, 4, 11, 31], 1, 1, 10, 4) == 0


def test_bad_indices():
    with pytest.raises(BadIndices):
        pseudo_distance([0, 1, 2], 2, 1, 10, 3)
    with pytest.raises(BadIndices):
        pseudo_distance([0, 1, 2], 0, 3, 10, 3)


def test_neighbor_probs_examples():
    assert neighbor_probs(4, 7) == (Fraction(7, 11), Fraction(4, 11))
    assert neighbor_probs(3.0, 3.0) == (0.5, 0.5)
    assert neighbor_probs(math.inf, 5) == (0, 1)
    assert neighbor_probs(5, math.inf) == (1, 0)
    with pytest.raises(BothInfinite):
        neighbor_probs(math.inf, math.inf)


def test_direction_falls_back_to_distance():
    assert direction_probs(math.inf, math.inf, 1, 3) == harmonic_probs(1, 3) == (
        Fraction(3, 4), Fraction(1, 4))


def test_estimate_exponent():
    assert next_exponent(4) == 1
    assert next_exponent(10) == 2
    assert next_exponent(11) == 2
    assert next_exponent(Fraction(1, 10)) == 0
    assert next_exponent(0.999) == 0
    assert z_value(2, True) == 100 and z_value(-1, True) == Fraction(1, 10)
    with pytest.raises(ValueError):
        next_exponent(0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=2, max_size=9), st.integers(-1, 3), st.data())
def test_metric_matches_naive_sum(gaps, exp, data):
    servers = [0]
    for g in gaps:
        servers.append(servers[-1] + g)
    n = len(servers)
    i = data.draw(st.integers(0, n - 1))
    j = data.draw(st.integers(i, n - 1))
    Z = z_value(exp, True)
    pm = PseudoMetric(servers, exp, n, exact=True)
    expected = naive_pd(servers, i, j, Z, n)
    assert pseudo_distance(servers, i, j, Z, n) == expected
    assert pm.index_between(i, j) == expected
    if len(set(servers)) == n:
        assert pm.between(servers[i], servers[j]) == expected


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=2, max_size=8), st.integers(0, 2), st.data())
def test_interpolated_point_splits_gap(gaps, exp, data):
    servers = [0]
    for g in gaps:
        servers.append(servers[-1] + g)
    n = len(servers)
    k = data.draw(st.integers(0, n - 2))
    lam = Fraction(data.draw(st.integers(1, 9)), 10)
    x = servers[k] + lam * (servers[k + 1] - servers[k])
    pm = PseudoMetric(servers, exp, n, exact=True)
    left, right = pm.around(0, x, n - 1)
    assert left == pm.between(servers[0], x) and right == pm.between(x, servers[-1])
    whole = pm.index_between(k, k + 1)
    part_l, part_r = pm.between(servers[k], x), pm.between(x, servers[k + 1])
    if whole == math.inf:
        assert part_l == part_r == math.inf
    else:
        assert part_l + part_r == whole and part_l == lam * whole
