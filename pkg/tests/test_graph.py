from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adcs.errors import DegreeOverflowError, SizeGuardError
from adcs.graph import (
    ConstituentGraph,
    ShareMatrix,
    check_t_connected,
    conductance,
    is_t_connected,
    isoperimetric_number,
    share_matrix,
    union_graph,
    window_product,
)
from adcs.oracle import naive_t_connected
from adcs.schedules import cycling, static, static_path

from .strategies import graphs, schedules

F = Fraction


def brute_isoperimetric(g: ConstituentGraph) -> Fraction:
    best = None
    for size in range(1, g.n // 2 + 1):
        for xs in combinations(range(g.n), size):
            inside = set(xs)
            boundary = sum(1 for u, v in g.edges if (u in inside) != (v in inside))
            val = F(boundary, size)
            best = val if best is None else min(best, val)
    return best


def test_union_of_two_rounds():
    s = cycling([ConstituentGraph(3, frozenset({(0, 1)})), ConstituentGraph(3, frozenset({(1, 2)}))], 2)
    assert union_graph(s, 0, 2).edges == {(0, 1), (1, 2)}


def test_union_of_empty_window():
    s = static(ConstituentGraph.empty(4), 3)
    assert union_graph(s, 0, 3).edges == frozenset()


@given(schedules(max_n=5))
def test_union_matches_membership(s):
    T = s.T
    u = union_graph(s, 0, T)
    for a, b in combinations(range(s.n), 2):
        present = any((a, b) in s.graph_at(t).edges for t in range(T))
        assert ((a, b) in u.edges) == present


def test_static_path_is_one_connected():
    assert is_t_connected(static_path(5), 0, 1)


def test_alternating_matchings_two_connected():
    s = cycling([ConstituentGraph(4, frozenset({(0, 1), (2, 3)})),
                 ConstituentGraph(4, frozenset({(1, 2), (0, 3)}))], 2)
    assert is_t_connected(s, 0, 2)
    assert naive_t_connected(s, 0, 2)


def test_isolated_node_breaks_connectivity():
    s = cycling([ConstituentGraph(4, frozenset({(0, 1), (1, 2)}))] * 3, 3)
    assert not is_t_connected(s, 0, 3)


def test_same_round_multi_hop_counts():
    # 0-1-2 in one round reaches 2 from 0 within T=1
    assert is_t_connected(static_path(3), 0, 1)


@given(schedules(max_n=4, max_T=3))
def test_t_connected_matches_journey_enumeration(s):
    for start in range(s.period):
        assert is_t_connected(s, start, s.T) == naive_t_connected(s, start, s.T)


@given(schedules(max_n=5, max_T=3))
def test_t_connected_implies_connected_union(s):
    for start in range(s.period):
        if is_t_connected(s, start, s.T):
            assert union_graph(s, start, s.T).is_connected


def test_aligned_and_every_offset_modes_differ():
    k, e = ConstituentGraph.complete(4), ConstituentGraph.empty(4)
    s = cycling([k, e, e, k], 2)
    assert check_t_connected(s, 2, aligned=True)
    assert not check_t_connected(s, 2)


@pytest.mark.parametrize("g, expected", [
    (ConstituentGraph.complete(4), F(2)),
    (ConstituentGraph.path(range(4)), F(1, 2)),
    (ConstituentGraph(3, frozenset({(0, 1)})), F(0)),
])
def test_isoperimetric_examples(g, expected):
    assert isoperimetric_number(g) == expected


@given(graphs(min_n=2, max_n=7))
def test_isoperimetric_matches_brute_force(g):
    assert isoperimetric_number(g) == brute_isoperimetric(g)


def test_isoperimetric_cap():
    with pytest.raises(SizeGuardError):
        isoperimetric_number(ConstituentGraph.empty(21))


def test_share_matrix_k2():
    p = share_matrix(ConstituentGraph.complete(2), 4)
    assert p.rows == ((F(3, 4), F(1, 4)), (F(1, 4), F(3, 4)))


def test_share_matrix_empty_is_identity():
    assert share_matrix(ConstituentGraph.empty(3), 5) == ShareMatrix.identity(3)


def test_share_matrix_path_rows_sum_to_one():
    p = share_matrix(ConstituentGraph.path(range(3)), 8)
    assert all(sum(row) == 1 for row in p.rows)


def test_share_matrix_rejects_high_degree():
    with pytest.raises(DegreeOverflowError):
        share_matrix(ConstituentGraph.complete(4), 6)


def test_window_product_single_round():
    g = ConstituentGraph.path(range(3))
    assert window_product(static(g), 0, 1, 8) == share_matrix(g, 8)


def test_window_product_k2_squared():
    p = window_product(static(ConstituentGraph.complete(2), 2), 0, 2, 4)
    assert p.rows == ((F(5, 8), F(3, 8)), (F(3, 8), F(5, 8)))


def test_window_product_of_empty_graphs():
    assert window_product(static(ConstituentGraph.empty(3), 3), 0, 3, 4) == ShareMatrix.identity(3)


@given(schedules(max_n=5, max_T=3))
def test_window_product_doubly_stochastic(s):
    p = window_product(s, 0, s.T, 2 * s.n)
    assert p.is_doubly_stochastic()


def test_conductance_examples():
    assert conductance(ShareMatrix.identity(3)) == 0
    assert conductance(share_matrix(ConstituentGraph.complete(2), 4)) == F(1, 4)


@given(graphs(min_n=2, max_n=6))
def test_conductance_bounds_isoperimetric(g):
    if not g.is_connected:
        return
    d = 2 * g.max_degree + 1
    assert conductance(share_matrix(g, d)) >= isoperimetric_number(g) / d


@given(schedules(max_n=5, max_T=2))
def test_window_conductance_bound(s):
    if not union_graph(s, 0, s.T).is_connected:
        return
    d = 2 * s.n
    p = window_product(s, 0, s.T, d)
    assert conductance(p) >= isoperimetric_number(union_graph(s, 0, s.T)) / d**s.T


@given(graphs(min_n=1, max_n=6), st.randoms(use_true_random=False))
def test_relabel_preserves_invariants(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = g.relabel(perm)
    assert len(h.edges) == len(g.edges)
    assert h.is_connected == g.is_connected
    if g.n >= 2:
        assert isoperimetric_number(h) == isoperimetric_number(g)
