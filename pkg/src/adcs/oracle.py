"""Independent exact references for the analysis: ideal dynamics, contraction,
truncation error and temporal flooding times. Everything here is rational
arithmetic with no tolerances.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ScheduleError
from .graph import close_within_round, conductance, share_matrix, window_product
from .numerics import round_update
from .schedules import EvolvingSchedule

Vector = tuple[Fraction, ...]


def ideal_evolution(initial: Sequence[Fraction], schedule: EvolvingSchedule, d: int, rounds: int,
                    start: int = 0, strong: bool = True) -> Vector:
    """Apply the untruncated share matrices of `rounds` consecutive rounds."""
    vec = tuple(Fraction(x) for x in initial)
    if len(vec) != schedule.n:
        raise ValueError("vector length must equal n")
    for t in range(start, start + rounds):
        vec = share_matrix(schedule.graph_at(t), d, strong).apply(vec)
    return vec


def _sq_distance_to_uniform(vec: Sequence[Fraction]) -> Fraction:
    n = len(vec)
    u = Fraction(1, n)
    return sum(((x - u) ** 2 for x in vec), Fraction(0))


@dataclass(frozen=True)
class ContractionResult:
    before: Fraction
    after: Fraction
    rhs: Fraction
    conductance: Fraction
    holds: bool


def contraction_check(schedule: EvolvingSchedule, d: int, T: int, window_index: int,
                      initial: Sequence[Fraction]) -> ContractionResult:
    """One block of T rounds: ||pi P - 1/n||^2 <= (1 - phi(P)^2) ||pi - 1/n||^2."""
    pi = tuple(Fraction(x) for x in initial)
    if sum(pi) != 1 or any(x < 0 for x in pi):
        raise ValueError("initial must be a probability distribution")
    p = window_product(schedule, window_index * T, T, d)
    phi = conductance(p)
    before = _sq_distance_to_uniform(pi)
    after = _sq_distance_to_uniform(p.apply(pi))
    rhs = (1 - phi**2) * before
    return ContractionResult(before, after, rhs, phi, after <= rhs)


def truncation_gap(schedule: EvolvingSchedule, d: int, c: int, rounds: int,
                   initial: Sequence[Fraction], start: int = 0) -> Vector:
    """Per-node |ideal - truncated| after `rounds` rounds.

    The truncated side uses the integer update at scale d^c, so the initial
    potentials must be multiples of d^-c.
    """
    scale = d**c
    nums = []
    for x in initial:
        v = Fraction(x) * scale
        if v.denominator != 1 or v < 0:
            raise ValueError(f"{x} is not a non-negative multiple of 1/{d}^{c}")
        nums.append(int(v))
    for t in range(start, start + rounds):
        nums = round_update(nums, schedule.graph_at(t).adjacency, d)
    ideal = ideal_evolution(initial, schedule, d, rounds, start, strong=False)
    return tuple(abs(a - Fraction(b, scale)) for a, b in zip(ideal, nums))


def temporal_broadcast_time(schedule: EvolvingSchedule, sources: Iterable[int], start: int = 0,
                            closure: bool = False, horizon: int | None = None) -> int:
    """Rounds of flooding until every node has heard from the source set.

    By default information moves one hop per round, which is what a node that
    sends one message per round can achieve. `closure=True` instead lets it
    cross a whole connected component of a round graph in that round.
    """
    n = schedule.n
    full = (1 << n) - 1
    reach = 0
    for s in sources:
        reach |= 1 << s
    if reach == 0:
        raise ValueError("source set must be nonempty")
    limit = horizon if horizon is not None else 4 * n * n * schedule.T * max(1, schedule.period)
    t = start
    while reach != full:
        if t - start >= limit:
            raise ScheduleError(f"flooding did not complete within {limit} rounds")
        g = schedule.graph_at(t)
        if closure:
            reach = close_within_round(reach, g)
        else:
            grown = reach
            for u in range(n):
                if reach >> u & 1:
                    grown |= g.neighbor_masks[u]
            reach = grown
        t += 1
    return t - start


def opportunistic_path_exists(schedule: EvolvingSchedule, u: int, v: int, start: int,
                              T: int) -> bool:
    """Explicit enumeration of journeys u -> v using edges at non-decreasing rounds.

    Deliberately naive: depth-first over (node, round) with the visited set
    tracked per journey. Used to cross-check the component-closure checker.
    """
    if u == v:
        return True
    end = start + T

    def extend(node: int, t: int, visited: frozenset[tuple[int, int]]) -> bool:
        for tt in range(t, end):
            for w in schedule.graph_at(tt).adjacency[node]:
                if w == v:
                    return True
                key = (w, tt)
                if key not in visited and extend(w, tt, visited | {key}):
                    return True
        return False

    return extend(u, start, frozenset({(u, start)}))


def naive_t_connected(schedule: EvolvingSchedule, start: int, T: int) -> bool:
    n = schedule.n
    return all(opportunistic_path_exists(schedule, a, b, start, T)
               for a in range(n) for b in range(n) if a != b)
