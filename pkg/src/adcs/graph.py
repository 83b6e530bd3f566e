"""Constituent graphs, temporal connectivity and exact expansion metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import DegreeOverflowError, SizeGuardError

if TYPE_CHECKING:
    from .schedules import EvolvingSchedule

ISOPERIMETRIC_CAP = 20
CONDUCTANCE_CAP = 16

Edge = tuple[int, int]


def _canonical_edges(n: int, edges: Iterable[Sequence[int]]) -> frozenset[Edge]:
    out = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if u == v:
            raise ValueError(f"self-loop at {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge {u}-{v} outside [0, {n})")
        out.add((min(u, v), max(u, v)))
    return frozenset(out)


@dataclass(frozen=True)
class ConstituentGraph:
    """Undirected simple graph on nodes 0..n-1 for a single round."""

    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a graph needs at least one node")
        object.__setattr__(self, "edges", _canonical_edges(self.n, self.edges))

    @classmethod
    def complete(cls, n: int) -> ConstituentGraph:
        return cls(n, frozenset(combinations(range(n), 2)))

    @classmethod
    def path(cls, order: Sequence[int]) -> ConstituentGraph:
        n = len(order)
        return cls(n, frozenset((order[i], order[i + 1]) for i in range(n - 1)))

    @classmethod
    def empty(cls, n: int) -> ConstituentGraph:
        return cls(n, frozenset())

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(a)) for a in nbrs)

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def component_masks(self) -> tuple[int, ...]:
        seen = 0
        comps = []
        for s in range(self.n):
            if seen >> s & 1:
                continue
            comp = frontier = 1 << s
            while frontier:
                grown = 0
                f = frontier
                while f:
                    low = f & -f
                    grown |= self.neighbor_masks[low.bit_length() - 1]
                    f ^= low
                frontier = grown & ~comp
                comp |= frontier
            seen |= comp
            comps.append(comp)
        return tuple(comps)

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    @property
    def is_connected(self) -> bool:
        return len(self.component_masks) == 1

    def relabel(self, perm: Sequence[int]) -> ConstituentGraph:
        """Graph with node u renamed perm[u]."""
        return ConstituentGraph(self.n, frozenset((perm[u], perm[v]) for u, v in self.edges))


def union_graph(schedule: EvolvingSchedule, start: int, window: int) -> ConstituentGraph:
    if window < 1:
        raise ValueError("window must be >= 1")
    edges: set[Edge] = set()
    for t in range(start, start + window):
        edges |= schedule.graph_at(t).edges
    return ConstituentGraph(schedule.n, frozenset(edges))


def close_within_round(reach: int, g: ConstituentGraph) -> int:
    """Extend a reachable set by every component of g it touches (multi-hop in one round)."""
    out = reach
    for comp in g.component_masks:
        if comp & reach:
            out |= comp
    return out


def is_t_connected(schedule: EvolvingSchedule, start: int, T: int) -> bool:
    """Opportunistic-path connectivity of every ordered pair within rounds start..start+T-1."""
    if T < 1:
        raise ValueError("T must be >= 1")
    n = schedule.n
    full = (1 << n) - 1
    graphs = [schedule.graph_at(t) for t in range(start, start + T)]
    for u in range(n):
        reach = 1 << u
        for g in graphs:
            reach = close_within_round(reach, g)
        if reach != full:
            return False
    return True


def window_starts(schedule: EvolvingSchedule, T: int, aligned: bool = False,
                  horizon: int | None = None) -> range:
    """Window start rounds that cover the schedule's behaviour.

    For a periodic schedule one period of starts suffices (windows wrap); an
    aperiodic schedule needs an explicit horizon.
    """
    if horizon is None:
        if schedule.period is None:
            raise ValueError("aperiodic schedule requires an explicit horizon")
        horizon = math.lcm(schedule.period, T) if aligned else schedule.period
    return range(0, horizon, T if aligned else 1)


def check_t_connected(schedule: EvolvingSchedule, T: int | None = None, aligned: bool = False,
                      horizon: int | None = None) -> bool:
    """Every-offset (default) or block-aligned T-connectivity over the schedule."""
    T = schedule.T if T is None else T
    return all(is_t_connected(schedule, s, T)
               for s in window_starts(schedule, T, aligned, horizon))


def _require_cap(n: int, cap: int, what: str) -> None:
    if n > cap:
        raise SizeGuardError(f"{what} enumeration over {n} nodes exceeds cap {cap}")


def isoperimetric_number(g: ConstituentGraph, cap: int = ISOPERIMETRIC_CAP) -> Fraction:
    """min over nonempty X with |X| <= n/2 of |boundary(X)| / |X|."""
    if g.n < 2:
        raise ValueError("isoperimetric number needs n >= 2")
    _require_cap(g.n, cap, "isoperimetric")
    masks = g.neighbor_masks
    best: Fraction | None = None
    for size in range(1, g.n // 2 + 1):
        for subset in combinations(range(g.n), size):
            x = 0
            for u in subset:
                x |= 1 << u
            boundary = sum((masks[u] & ~x).bit_count() for u in subset)
            val = Fraction(boundary, size)
            if best is None or val < best:
                best = val
                if best == 0:
                    return best
    assert best is not None
    return best


@dataclass(frozen=True)
class ShareMatrix:
    """Square matrix of exact rationals, stored row-major."""

    rows: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> ShareMatrix:
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    def __matmul__(self, other: ShareMatrix) -> ShareMatrix:
        n = self.n
        cols = list(zip(*other.rows))
        return ShareMatrix(tuple(
            tuple(sum((a * b for a, b in zip(self.rows[i], cols[j])), Fraction(0))
                  for j in range(n))
            for i in range(n)))

    def apply(self, vector: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Row-vector product vector @ self."""
        n = self.n
        return tuple(sum((vector[i] * self.rows[i][j] for i in range(n)), Fraction(0))
                     for j in range(n))

    def is_doubly_stochastic(self) -> bool:
        if any(x < 0 for row in self.rows for x in row):
            return False
        return (all(sum(row) == 1 for row in self.rows)
                and all(sum(col) == 1 for col in zip(*self.rows)))

    def min_diagonal(self) -> Fraction:
        return min(self.rows[i][i] for i in range(self.n))


def share_matrix(g: ConstituentGraph, d: int, strong: bool = True) -> ShareMatrix:
    """Untruncated share dynamics: 1/d per edge, the rest stays on the diagonal.

    ``strong`` enforces d > 2 * max degree (diagonal >= 1/2); without it only a
    non-negative diagonal is required.
    """
    maxdeg = g.max_degree
    if strong and d <= 2 * maxdeg:
        raise DegreeOverflowError(f"d={d} must exceed twice the max degree {maxdeg}")
    if not strong and d < maxdeg:
        raise DegreeOverflowError(f"d={d} is below the max degree {maxdeg}")
    share = Fraction(1, d)
    rows = []
    for u in range(g.n):
        nbrs = set(g.adjacency[u])
        rows.append(tuple(
            1 - len(nbrs) * share if v == u else (share if v in nbrs else Fraction(0))
            for v in range(g.n)))
    return ShareMatrix(tuple(rows))


def window_product(schedule: EvolvingSchedule, start: int, T: int, d: int,
                   strong: bool = True) -> ShareMatrix:
    """Product of the per-round share matrices, in round order."""
    out = ShareMatrix.identity(schedule.n)
    for t in range(start, start + T):
        out = out @ share_matrix(schedule.graph_at(t), d, strong)
    return out


def conductance(p: ShareMatrix, cap: int = CONDUCTANCE_CAP) -> Fraction:
    """min over nonempty S with |S| <= n/2 of (1/|S|) * sum_{u in S, h not in S} p[u][h]."""
    n = p.n
    _require_cap(n, cap, "conductance")
    best: Fraction | None = None
    for size in range(1, n // 2 + 1):
        for subset in combinations(range(n), size):
            inside = set(subset)
            flow = sum((p.rows[u][h] for u in subset for h in range(n) if h not in inside),
                       Fraction(0))
            val = flow / size
            if best is None or val < best:
                best = val
    if best is None:
        raise ValueError("conductance needs n >= 2")
    return best


@dataclass(frozen=True)
class GraphStats:
    window_index: int
    isoperimetric: Fraction
    conductance: Fraction


def window_stats(schedule: EvolvingSchedule, T: int, d: int, window_index: int,
                 aligned: bool = True) -> GraphStats:
    """Expansion of window j: rounds j*T.. (aligned) or j.. (every offset)."""
    start = window_index * T if aligned else window_index
    iso = isoperimetric_number(union_graph(schedule, start, T))
    phi = conductance(window_product(schedule, start, T, d))
    return GraphStats(window_index, iso, phi)


def min_window_isoperimetric(schedule: EvolvingSchedule, T: int | None = None,
                             aligned: bool = False, horizon: int | None = None) -> Fraction:
    """Brute-force i_min over all windows of the schedule."""
    T = schedule.T if T is None else T
    return min(isoperimetric_number(union_graph(schedule, s, T))
               for s in window_starts(schedule, T, aligned, horizon))
