"""Shared hypothesis strategies."""
from __future__ import annotations

from itertools import combinations

from hypothesis import strategies as st

from adcs.graph import ConstituentGraph
from adcs.schedules import cycling


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 6, max_degree: int | None = None):
    n = draw(st.integers(min_n, max_n))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    if max_degree is not None:
        deg = [0] * n
        kept = []
        for u, v in chosen:
            if deg[u] < max_degree and deg[v] < max_degree:
                kept.append((u, v))
                deg[u] += 1
                deg[v] += 1
        chosen = kept
    return ConstituentGraph(n, frozenset(chosen))


@st.composite
def schedules(draw, min_n: int = 2, max_n: int = 4, max_T: int = 3):
    n = draw(st.integers(min_n, max_n))
    T = draw(st.integers(1, max_T))
    length = draw(st.integers(1, 2 * T))
    pairs = list(combinations(range(n), 2))
    rounds = [ConstituentGraph(n, frozenset(draw(st.lists(st.sampled_from(pairs), unique=True))))
              for _ in range(length)]
    return cycling(rounds, T)
