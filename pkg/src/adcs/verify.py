"""Self-contained oracle and invariant checks behind ``adcs verify``.

Each check returns (ok, detail). They are quick versions of the test suite:
hand-evaluated examples, randomized exact invariants, and small end-to-end
protocol runs at full parameters.
"""
from __future__ import annotations

import logging
import random
from fractions import Fraction
from itertools import combinations
from typing import Callable

from . import codec
from .graph import (
    ConstituentGraph,
    conductance,
    is_t_connected,
    isoperimetric_number,
    min_window_isoperimetric,
    share_matrix,
    window_product,
)
from .numerics import FixedPointParams, Potential, potential_update, round_update, truncate_share
from .oracle import contraction_check, naive_t_connected, temporal_broadcast_time, truncation_gap
from .params import broadcast_rounds, derive_mult_params, derive_rmc_params
from .protocols.inputs import canonicalize_all
from .protocols.messages import Status, bit_msg, gossip, potential_msg, status_msg
from .protocols.runs import SystemConfig, all_to_all, multiplicity_run, rmc_run
from .schedules import EvolvingSchedule, cycling, static, static_clique, static_path, suite

log = logging.getLogger(__name__)

Check = Callable[[], tuple[bool, str]]


def random_graph(n: int, rng: random.Random, prob: float = 0.5,
                 max_degree: int | None = None) -> ConstituentGraph:
    edges = []
    deg = [0] * n
    for u, v in combinations(range(n), 2):
        if rng.random() < prob and (max_degree is None
                                    or (deg[u] < max_degree and deg[v] < max_degree)):
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    return ConstituentGraph(n, frozenset(edges))


def random_distribution(n: int, rng: random.Random) -> tuple[Fraction, ...]:
    weights = [rng.randint(0, 20) for _ in range(n)]
    if sum(weights) == 0:
        weights[0] = 1
    total = sum(weights)
    return tuple(Fraction(w, total) for w in weights)


def check_graph_examples() -> tuple[bool, str]:
    path4 = ConstituentGraph.path(range(4))
    k2 = share_matrix(ConstituentGraph.complete(2), 4)
    two = window_product(static(ConstituentGraph.complete(2), 2), 0, 2, 4)
    ok = (isoperimetric_number(ConstituentGraph.complete(4)) == 2
          and isoperimetric_number(path4) == Fraction(1, 2)
          and k2.rows == ((Fraction(3, 4), Fraction(1, 4)), (Fraction(1, 4), Fraction(3, 4)))
          and two.rows == ((Fraction(5, 8), Fraction(3, 8)), (Fraction(3, 8), Fraction(5, 8)))
          and conductance(k2) == Fraction(1, 4))
    return ok, ""


def check_numerics_examples() -> tuple[bool, str]:
    p = FixedPointParams(2, 2)
    half = truncate_share(Potential.of(1, p), p).value == Fraction(1, 2)
    quarter = truncate_share(Potential.of(Fraction(3, 4), p), p).value == Fraction(1, 4)
    q = FixedPointParams(4, 2)
    a, b = Potential.of(1, q), Potential.of(0, q)
    pair = (potential_update(a, [b], q).value, potential_update(b, [a], q).value)
    return half and quarter and pair == (Fraction(3, 4), Fraction(1, 4)), ""


def check_parameter_examples() -> tuple[bool, str]:
    r = derive_rmc_params(2, 1, 1)
    m = derive_mult_params(2, 1)
    ok = (r.tau == Fraction(3, 4) and r.d == 8 and derive_rmc_params(4, 1, 1).d == 32
          and m.alpha == 3 and m.c == 21 and m.d >= 4)
    return ok, f"k=2: d={r.d} c={r.c} p={r.p} r={r.r}"


def check_conservation(rounds: int = 2000, seed: int = 7) -> tuple[bool, str]:
    rng = random.Random(seed)
    for _ in range(rounds):
        n = rng.randint(2, 8)
        d = rng.choice([2 * n, 2 * n + 1, 16, 64])
        g = random_graph(n, rng, max_degree=(d - 1) // 2)
        nums = [rng.randint(0, d**3) for _ in range(n)]
        after = round_update(nums, g.adjacency, d)
        if sum(after) != sum(nums) or min(after) < 0:
            return False, f"n={n} d={d} before={nums} after={after}"
    return True, f"{rounds} rounds"


def check_conductance_bound(samples: int = 200, seed: int = 11) -> tuple[bool, str]:
    rng = random.Random(seed)
    for _ in range(samples):
        n = rng.randint(2, 6)
        g = random_graph(n, rng)
        if not g.is_connected:
            continue
        d = 2 * n * n
        if conductance(share_matrix(g, d)) < isoperimetric_number(g) / d:
            return False, f"edges={sorted(g.edges)}"
    return True, ""


def check_contraction(samples: int = 60, seed: int = 13) -> tuple[bool, str]:
    rng = random.Random(seed)
    for _ in range(samples):
        n = rng.randint(2, 6)
        T = rng.randint(1, 2)
        sched = cycling([random_graph(n, rng) for _ in range(T)], T)
        res = contraction_check(sched, 2 * n * T, T, 0, random_distribution(n, rng))
        if not res.holds:
            return False, f"{res}"
    return True, ""


def check_t_connectivity(samples: int = 60, seed: int = 17) -> tuple[bool, str]:
    rng = random.Random(seed)
    for _ in range(samples):
        n = rng.randint(2, 4)
        T = rng.randint(1, 3)
        sched = cycling([random_graph(n, rng, prob=0.3) for _ in range(T)], T)
        if is_t_connected(sched, 0, T) != naive_t_connected(sched, 0, T):
            return False, f"n={n} T={T}"
    return True, ""


def check_truncation(samples: int = 40, seed: int = 19) -> tuple[bool, str]:
    rng = random.Random(seed)
    for _ in range(samples):
        n, d, c, rounds = 5, 10, 3, rng.randint(1, 6)
        sched = cycling([random_graph(n, rng, max_degree=4) for _ in range(rounds)], 1)
        initial = [Fraction(rng.randint(0, d**c), d**c) for _ in range(n)]
        bound = Fraction(rounds * (n - 1), d**c)
        if max(truncation_gap(sched, d, c, rounds, initial)) > bound:
            return False, f"rounds={rounds}"
    return True, ""


def check_broadcast_bound(ns: range = range(2, 6)) -> tuple[bool, str]:
    for n in ns:
        for T in (1, 2):
            for sched in suite(n, T):
                bound = broadcast_rounds(n, T, min_window_isoperimetric(sched))
                for start in range(sched.period):
                    for src in range(n):
                        if temporal_broadcast_time(sched, [src], start) > bound:
                            return False, f"{sched.kind} n={n} T={T} start={start} src={src}"
    return True, ""


def check_codec() -> tuple[bool, str]:
    msgs = [gossip(Status.PROBING, 0), gossip(Status.LOW, 12345678901234567890),
            status_msg(Status.DONE), bit_msg(True), bit_msg(False), potential_msg(2**200 + 3)]
    for m in msgs:
        value, width = codec.encode(m)
        if codec.decode(value, width) != m or width != codec.message_width(m):
            return False, f"{m}"
    return True, ""


def check_small_runs() -> tuple[bool, str]:
    for n in (2, 3):
        out = rmc_run(SystemConfig(n, 1, 1), static_clique(n))
        if out.outputs != [n] * n:
            return False, f"rmc n={n}: {out.outputs}"
    msgs = canonicalize_all([1, 0, 0, 0], 4)
    if multiplicity_run(msgs, msgs[0], 4, static_path(4), derive_mult_params(4, 1)) != [1] * 4:
        return False, "multiplicity n=4 path"
    got = all_to_all(canonicalize_all(["0", "1"], 2), SystemConfig(2, 1, 1), static_clique(2))
    if got != [{"0": 1, "1": 1}] * 2:
        return False, f"all-to-all n=2: {got}"
    return True, ""


CHECKS: dict[str, Check] = {
    "graph examples": check_graph_examples,
    "numerics examples": check_numerics_examples,
    "parameter examples": check_parameter_examples,
    "conservation and non-negativity": check_conservation,
    "conductance vs isoperimetric": check_conductance_bound,
    "mixing contraction": check_contraction,
    "T-connectivity vs journey enumeration": check_t_connectivity,
    "truncation error bound": check_truncation,
    "broadcast time bound": check_broadcast_bound,
    "codec round trip": check_codec,
    "small end-to-end runs": check_small_runs,
}


def run_checks() -> list[tuple[str, bool, str]]:
    results = []
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        log.debug("%s: %s", name, ok)
        results.append((name, ok, detail))
    return results
