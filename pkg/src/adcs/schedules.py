"""Evolving-graph schedules (the adversary) and their text file format."""
from __future__ import annotations

import hashlib
import logging
import random
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

from .errors import ScheduleError
from .graph import ConstituentGraph, check_t_connected, is_t_connected

log = logging.getLogger(__name__)

KINDS = ("static-clique", "static-path", "matching-alternation", "random-T-connected")


@dataclass(frozen=True)
class EvolvingSchedule:
    """Periodic schedule: graph_at(t) = graphs[t mod period].

    Every shipped family is periodic, which is what lets the accelerated
    executor detect repeated states at period boundaries.
    """

    n: int
    T: int
    kind: str
    graphs: tuple[ConstituentGraph, ...]
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.graphs:
            raise ScheduleError("schedule needs at least one round")
        if any(g.n != self.n for g in self.graphs):
            raise ScheduleError("every round must have the schedule's node count")
        if self.T < 1:
            raise ScheduleError("T must be >= 1")

    @property
    def period(self) -> int:
        return len(self.graphs)

    def graph_at(self, t: int) -> ConstituentGraph:
        if t < 0:
            raise ValueError("rounds are non-negative")
        return self.graphs[t % len(self.graphs)]

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.kind}|{self.seed}|{self.n}|{self.T}".encode())
        for g in self.graphs:
            h.update(repr(sorted(g.edges)).encode())
        return h.hexdigest()[:16]

    def validate(self, aligned: bool = False) -> None:
        if not check_t_connected(self, self.T, aligned=aligned):
            raise ScheduleError(f"{self.kind} schedule (n={self.n}) is not {self.T}-connected")

    def relabel(self, perm: Sequence[int]) -> EvolvingSchedule:
        return EvolvingSchedule(self.n, self.T, self.kind,
                                tuple(g.relabel(perm) for g in self.graphs), self.seed)


def static(graph: ConstituentGraph, T: int = 1, kind: str = "static") -> EvolvingSchedule:
    return EvolvingSchedule(graph.n, T, kind, (graph,))


def static_clique(n: int, T: int = 1) -> EvolvingSchedule:
    return static(ConstituentGraph.complete(n), T, "static-clique")


def static_path(n: int, T: int = 1) -> EvolvingSchedule:
    return static(ConstituentGraph.path(range(n)), T, "static-path")


def cycling(graphs: Sequence[ConstituentGraph], T: int, kind: str = "cycling") -> EvolvingSchedule:
    return EvolvingSchedule(graphs[0].n, T, kind, tuple(graphs))


def matching_alternation(n: int, T: int = 2) -> EvolvingSchedule:
    """Two alternating sparse rounds whose union is connected.

    With T >= 2 and n >= 4 each round is a union of two paths, so no single
    round is connected; n = 4 gives the matchings {01,23} and {12,03}. With
    T = 1 every round must be connected, so two different spanning paths
    alternate.
    """
    if n < 2:
        raise ScheduleError("need n >= 2")
    if T == 1:
        order = [v for v in range(0, n, 2)] + [v for v in range(n - 1, 0, -1) if v % 2]
        a = ConstituentGraph.path(range(n))
        b = ConstituentGraph.path(order)
    elif n <= 3:
        a = ConstituentGraph.empty(n)
        b = ConstituentGraph.path(range(n))
    else:
        h = n // 2
        ring = {(i, (i + 1) % n) for i in range(n)}
        a = ConstituentGraph(n, frozenset(ring - {(h - 1, h), (n - 1, 0)}))
        b = ConstituentGraph(n, frozenset(ring - {(0, 1), (h, h + 1)}))
    return cycling((a, b), T, "matching-alternation")


def _random_tree(n: int, rng: random.Random) -> set[tuple[int, int]]:
    if n == 2:
        return {(0, 1)}
    prufer = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for v in prufer:
        degree[v] += 1
    edges = set()
    for v in prufer:
        leaf = min(u for u in range(n) if degree[u] == 1)
        edges.add((min(leaf, v), max(leaf, v)))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = [x for x in range(n) if degree[x] == 1]
    edges.add((u, w))
    return edges


def random_t_connected(n: int, T: int, seed: int, windows: int = 8,
                       edge_prob: float | None = None, max_attempts: int = 200) -> EvolvingSchedule:
    """Seeded periodic schedule of `windows` blocks of T rounds.

    Each block carries a random spanning tree (Pruefer code) in one uniformly
    chosen round; the other rounds carry independent random edges. Blocks are
    redrawn until every T-window, including the ones straddling blocks and the
    wrap-around, is T-connected.
    """
    if n < 2:
        raise ScheduleError("need n >= 2")
    rng = random.Random(f"random-T-connected|{n}|{T}|{seed}")
    prob = edge_prob if edge_prob is not None else 1.0 / n
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]

    def block() -> list[ConstituentGraph]:
        tree_at = rng.randrange(T)
        rounds = []
        for i in range(T):
            edges = {e for e in pairs if rng.random() < prob}
            if i == tree_at:
                edges |= _random_tree(n, rng)
            rounds.append(ConstituentGraph(n, frozenset(edges)))
        return rounds

    for _ in range(max_attempts):
        table: list[ConstituentGraph] = []
        for _ in range(windows):
            for _ in range(max_attempts):
                candidate = table + block()
                probe = EvolvingSchedule(n, T, "probe", tuple(candidate))
                first = max(0, len(table) - T + 1)
                if all(is_t_connected(probe, s, T) for s in range(first, len(candidate) - T + 1)):
                    table = candidate
                    break
            else:
                raise ScheduleError("could not extend random schedule")
        sched = EvolvingSchedule(n, T, "random-T-connected", tuple(table), seed)
        if check_t_connected(sched, T):
            return sched
        log.debug("random schedule wrap window failed; redrawing (n=%d T=%d seed=%d)", n, T, seed)
    raise ScheduleError("could not draw a T-connected random schedule")


def make_schedule(kind: str, n: int, T: int, seed: int = 0) -> EvolvingSchedule:
    if kind == "static-clique":
        return static_clique(n, T)
    if kind == "static-path":
        return static_path(n, T)
    if kind == "matching-alternation":
        return matching_alternation(n, T)
    if kind == "random-T-connected":
        return random_t_connected(n, T, seed)
    raise ScheduleError(f"unknown schedule kind {kind!r}; expected one of {KINDS}")


def suite(n: int, T: int, seeds: Sequence[int] = (1, 2, 3)) -> list[EvolvingSchedule]:
    """The standard schedule suite: two static graphs, alternation, three random draws."""
    out = [static_clique(n, T), static_path(n, T), matching_alternation(n, T)]
    out += [random_t_connected(n, T, s) for s in seeds]
    return out


_HEADER_RE = re.compile(r"^\s*n\s*=\s*(\d+)\s+T\s*=\s*(\d+)\s*$")
_ROUND_RE = re.compile(r"^\s*t\s*=\s*(\d+)\s*:\s*(.*?)\s*$")


def parse_schedule(text: str, kind: str = "file") -> EvolvingSchedule:
    """Parse `n=<int> T=<int>` followed by `t=<int>: u-v,...` lines.

    Rounds must be listed as 0..P-1 and the schedule repeats with period P.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ScheduleError("empty schedule file")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise ScheduleError(f"bad header line: {lines[0]!r}")
    n, T = int(m.group(1)), int(m.group(2))
    graphs: list[ConstituentGraph] = []
    for ln in lines[1:]:
        rm = _ROUND_RE.match(ln)
        if rm is None:
            raise ScheduleError(f"bad round line: {ln!r}")
        t = int(rm.group(1))
        if t != len(graphs):
            raise ScheduleError(f"expected round t={len(graphs)}, found t={t}")
        edges = []
        body = rm.group(2)
        if body:
            for tok in body.split(","):
                tok = tok.strip()
                parts = tok.split("-")
                if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
                    raise ScheduleError(f"bad edge {tok!r} in round {t}")
                edges.append((int(parts[0]), int(parts[1])))
        try:
            graphs.append(ConstituentGraph(n, frozenset(edges)))
        except ValueError as exc:
            raise ScheduleError(f"round {t}: {exc}") from exc
    return EvolvingSchedule(n, T, kind, tuple(graphs))


def format_schedule(schedule: EvolvingSchedule) -> str:
    out = [f"n={schedule.n} T={schedule.T}"]
    for t, g in enumerate(schedule.graphs):
        out.append(f"t={t}: " + ",".join(f"{u}-{v}" for u, v in sorted(g.edges)))
    return "\n".join(out) + "\n"


def load_schedule(path: str | Path) -> EvolvingSchedule:
    return parse_schedule(Path(path).read_text())


def save_schedule(schedule: EvolvingSchedule, path: str | Path) -> None:
    Path(path).write_text(format_schedule(schedule))
