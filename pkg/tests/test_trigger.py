import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linematch.core import optimal_partial_cost
from linematch.trigger import (DegenerateInterval, DomainError, NotATrigger, TriggerContext,
                               is_trigger_point, linear_map, normalized_cost, trigger_boundaries)
from oracles import brute_opt, scan_trigger_boundaries

EXAMPLE = (0, 4, 11, 31)


def test_example_trigger_points():
    ctx = TriggerContext((4, 4), EXAMPLE, 10, left=0, right=11)
    assert is_trigger_point(ctx, 4)
    assert not is_trigger_point(ctx, 0)
    assert ctx.opt_with(4) == 11 and ctx.opt_with(0) == 7
    assert ctx.midpoint == Fraction(11, 2)


def test_infinite_estimate_never_triggers():
    ctx = TriggerContext((4, 4), EXAMPLE, math.inf)
    assert not any(ctx.is_trigger(x) for x in (-100, 0, 4, 7.5, 1000))


def test_example_boundaries_against_scan():
    # OPT(4, 4, y) is y + 7 left of 4 and 15 - y right of it
    ctx = TriggerContext((4, 4), EXAMPLE, 10, left=0, right=11)
    y_left, y_right = trigger_boundaries(ctx, 4)
    assert (y_left, y_right) == (3, 5)
    assert optimal_partial_cost((4, 4, y_left), EXAMPLE) == 10
    assert optimal_partial_cost((4, 4, y_right), EXAMPLE) == 10
    scan = scan_trigger_boundaries((4, 4), EXAMPLE, 10, 4, 0, 11, Fraction(1, 10 ** 4))
    assert abs(scan[0] - y_left) <= Fraction(1, 10 ** 4)
    assert abs(scan[1] - y_right) <= Fraction(1, 10 ** 4)


def test_clamped_boundary():
    ctx = TriggerContext((4, 4), EXAMPLE, 5, left=0, right=11)
    assert trigger_boundaries(ctx, 4) == (0, 10)


def test_not_a_trigger():
    ctx = TriggerContext((4, 4), EXAMPLE, 10, left=0, right=11)
    with pytest.raises(NotATrigger):
        trigger_boundaries(ctx, 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 8), min_size=3, max_size=6), st.data())
def test_trigger_set_structure_and_boundaries(gaps, data):
    servers = [0]
    for g in gaps:
        servers.append(servers[-1] + g)
    n = len(servers)
    prior = data.draw(st.lists(st.sampled_from(servers), min_size=1, max_size=n - 2))
    base = brute_opt(prior, servers)
    Z = base + data.draw(st.integers(1, 6))
    ctx = TriggerContext(prior, servers, Z)
    for a, b in zip(servers, servers[1:]):
        xs = [a + Fraction(k, 20) * (b - a) for k in range(21)]
        flags = [brute_opt(prior + [x], servers) >= Z for x in xs]
        assert flags == [ctx.is_trigger(x) for x in xs]
        # trigger points within one gap between servers form one interval
        runs = sum(1 for u, v in zip([False] + flags, flags) if v and not u)
        assert runs <= 1
    x = data.draw(st.sampled_from(servers))
    if ctx.is_trigger(x):
        left = max([s for s in servers if s < x], default=x - 5)
        right = min([s for s in servers if s > x], default=x + 5)
        local = TriggerContext(prior, servers, Z, left=left, right=right)
        y_l, y_r = trigger_boundaries(local, x)
        assert left <= y_l <= x <= y_r <= right
        if y_l > left:
            assert ctx.opt_with(y_l) == Z
        if y_r < right:
            assert ctx.opt_with(y_r) == Z


def test_normalized_cost_identities():
    assert normalized_cost(0, Fraction(1, 3)) == Fraction(1, 3)
    assert normalized_cost(Fraction(2, 7), Fraction(1, 2)) == Fraction(1, 2)
    assert normalized_cost(0.2, 0.3) == pytest.approx(0.38)
    for a in (0, 0.25, 0.8):
        for g in (0, 0.4, 1):
            assert normalized_cost(a, g) == pytest.approx(normalized_cost(1 - a, 1 - g))
    with pytest.raises(DomainError):
        normalized_cost(1.5, 0)


def test_linear_map():
    assert linear_map(2, 6, 4) == Fraction(1, 2)
    assert linear_map(2, 6, 2) == 0
    assert linear_map(2.0, 6.0, 5.0) == 0.75
    with pytest.raises(DegenerateInterval):
        linear_map(3, 3, 3)
