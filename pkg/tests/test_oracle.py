from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adcs.errors import ScheduleError
from adcs.graph import ConstituentGraph, is_t_connected
from adcs.oracle import (
    contraction_check,
    ideal_evolution,
    naive_t_connected,
    opportunistic_path_exists,
    temporal_broadcast_time,
    truncation_gap,
)
from adcs.schedules import cycling, static, static_clique, static_path

from .strategies import schedules

K2 = ConstituentGraph.complete(2)
EMPTY3 = ConstituentGraph(3, frozenset())


def test_ideal_evolution_two_rounds_on_k2():
    vec = ideal_evolution([1, 0], static(K2, 1), 4, 2)
    assert vec == (Fraction(5, 8), Fraction(3, 8))


def test_truncation_gap_cancels_per_node_on_k2():
    # each node loses 1/8 to flooring and receives 1/8 less; errors cancel
    gap = truncation_gap(static(K2, 1), 2, 2, 1, [Fraction(3, 4), Fraction(1, 4)])
    assert gap == (0, 0)


def test_share_level_flooring_loses_an_eighth():
    share = Fraction(3, 4) / 2
    floored = Fraction(int(share * 4), 4)
    assert share - floored == Fraction(1, 8)


def test_truncation_gap_requires_grid_values():
    with pytest.raises(ValueError):
        truncation_gap(static(K2, 1), 2, 2, 1, [Fraction(1, 3), Fraction(2, 3)])


@given(schedules(min_n=2, max_n=5, max_T=2), st.data())
def test_truncation_gap_within_bound(sched, data):
    maxdeg = max(g.max_degree for g in sched.graphs)
    d, c = 2 * maxdeg + 2, 3
    rounds = data.draw(st.integers(1, 6))
    initial = [Fraction(data.draw(st.integers(0, d**c)), d**c) for _ in range(sched.n)]
    gap = truncation_gap(sched, d, c, rounds, initial)
    assert max(gap) <= Fraction(rounds * (sched.n - 1), d**c)


def test_contraction_on_k2():
    res = contraction_check(static(K2, 1), 4, 1, 0, [1, 0])
    assert res.before == Fraction(1, 2) and res.after == Fraction(1, 8) and res.holds


def test_contraction_rejects_non_distribution():
    with pytest.raises(ValueError):
        contraction_check(static(K2, 1), 4, 1, 0, [1, 1])


@pytest.mark.parametrize("sched, expected", [
    (static(EMPTY3, 1), None),
    (static_path(4), 3),
    (static_clique(4), 1),
])
def test_broadcast_time_examples(sched, expected):
    if expected is None:
        with pytest.raises(ScheduleError):
            temporal_broadcast_time(sched, [0], horizon=50)
    else:
        assert temporal_broadcast_time(sched, [0]) == expected


def test_broadcast_from_all_nodes_takes_no_rounds():
    assert temporal_broadcast_time(static_path(4), range(4)) == 0


def test_closure_crosses_path_in_one_round():
    assert temporal_broadcast_time(static_path(4), [0], closure=True) == 1


def test_journey_respects_time_order():
    a = ConstituentGraph(3, frozenset({(1, 2)}))
    b = ConstituentGraph(3, frozenset({(0, 1)}))
    sched = cycling([a, b], 2)
    assert opportunistic_path_exists(sched, 2, 0, 0, 2)
    assert not opportunistic_path_exists(sched, 0, 2, 0, 2)


@given(schedules(min_n=2, max_n=4, max_T=3), st.integers(0, 5))
def test_closure_checker_matches_enumeration(sched, start):
    assert is_t_connected(sched, start, sched.T) == naive_t_connected(sched, start, sched.T)
