"""Exact bulk execution of potential-sharing rounds.

Numerators are held as little-endian limbs in int64 arrays and updated
with the same integer rule as the reference nodes. The schedule is periodic,
so the joint state (all numerators and statuses) is compared at period
boundaries; once a state repeats, the remaining rounds are skipped by a
whole number of cycles. Segments that start from an already-seen state at
the same schedule offset are answered from a memo. The result is
bit-identical to stepping every round.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numba as nb
import numpy as np

from .schedules import EvolvingSchedule

log = logging.getLogger(__name__)

FLOAT_BITS = 52
RING = 8
MAX_D = 1 << 20
MEMO_SIZE = 4096
CHECK_EVERY = 64


@nb.njit(cache=True)
def _state_hash(X, XS, n, L):
    h = np.uint64(1469598103934665603)
    prime = np.uint64(1099511628211)
    for u in range(n):
        h = (h ^ np.uint64(XS[u] + 7)) * prime
        for i in range(L):
            h = (h ^ np.uint64(X[u, i])) * prime
    return h


@nb.njit(cache=True)
def _same(X, XS, ring_n, ring_s, j, n, L):
    for u in range(n):
        if ring_s[j, u] != XS[u]:
            return False
        for i in range(L):
            if ring_n[j, u, i] != X[u, i]:
                return False
    return True


@nb.njit(cache=True)
def _bulk_kernel(N, S, pin, d, width, ptr, idx, period, every, t0, rounds, strict, stats, seen):
    """Advance N (n x L limbs of `width` bits) and S (statuses) by up to `rounds` rounds in place.

    stats receives [rounds completed, rounds simulated, rounds skipped,
    violation flag]; seen is OR-ed with every numerator produced.
    """
    n, L = N.shape
    q = np.zeros((n, L), np.int64)
    X = N.copy()
    XS = S.copy()
    Y = np.zeros((n, L), np.int64)
    YS = np.zeros(n, np.int8)
    ring_h = np.zeros(RING, np.uint64)
    ring_n = np.zeros((RING, n, L), np.int64)
    ring_s = np.zeros((RING, n), np.int8)
    ring_r = np.zeros(RING, np.int64)
    stored = 0
    inv_d = 1.0 / d
    mask = (np.int64(1) << width) - 1
    shift = -1
    if d & (d - 1) == 0:
        shift = 0
        while (1 << shift) < d:
            shift += 1
    rem = np.zeros(n, np.int64)
    rr = 0
    skipped = 0
    detect = True
    violated = 0
    while rr < rounds:
        s = (t0 + rr) % period
        if detect and (t0 + rr) % every == 0:
            h = _state_hash(X, XS, n, L)
            found = -1
            for j in range(min(stored, RING)):
                if ring_h[j] == h and _same(X, XS, ring_n, ring_s, j, n, L):
                    found = j
                    break
            if found >= 0:
                cycle = rr - ring_r[found]
                jump = ((rounds - rr) // cycle) * cycle
                rr += jump
                skipped += jump
                detect = False
                continue
            slot = stored % RING
            ring_h[slot] = h
            ring_r[slot] = rr
            ring_n[slot, :, :] = X
            ring_s[slot, :] = XS
            stored += 1
        if shift >= 0:
            for u in range(n):
                for i in range(L - 1):
                    q[u, i] = (X[u, i] >> shift) | ((X[u, i + 1] << (width - shift)) & mask)
                q[u, L - 1] = X[u, L - 1] >> shift
        else:
            # limb-major order keeps the n remainder chains independent
            for u in range(n):
                rem[u] = 0
            for i in range(L - 1, -1, -1):
                for u in range(n):
                    acc = (rem[u] << width) | X[u, i]
                    qq = np.int64(acc * inv_d)
                    r = acc - qq * d
                    if r < 0:
                        qq -= 1
                        r += d
                    elif r >= d:
                        qq += 1
                        r -= d
                    rem[u] = r
                    q[u, i] = qq
        for u in range(n):
            a = ptr[s, u]
            b = ptr[s, u + 1]
            deg = b - a
            ok = XS[u] == 0 and 2 * deg < d
            if ok:
                for j in range(a, b):
                    if XS[idx[j]] != 0:
                        ok = False
                        break
            if ok:
                carry = 0
                for i in range(L):
                    x = X[u, i] - deg * q[u, i] + carry
                    for j in range(a, b):
                        x += q[idx[j], i]
                    carry = x >> width
                    y = x & mask
                    Y[u, i] = y
                    seen[i] |= y
                YS[u] = 0
            else:
                if strict:
                    violated = 1
                    break
                for i in range(L):
                    Y[u, i] = pin[i]
                    seen[i] |= pin[i]
                YS[u] = 1
        if violated:
            break
        X, Y = Y, X
        XS, YS = YS, XS
        rr += 1
    N[:, :] = X
    S[:] = XS
    stats[0] = rr
    stats[1] = rr - skipped
    stats[2] = skipped
    stats[3] = violated


def limb_width(d: int) -> int:
    """Limb size that keeps (remainder, limb) below 2^52 for float division."""
    return FLOAT_BITS - d.bit_length()


def to_limbs(x: int, L: int, width: int = 32) -> np.ndarray:
    mask = (1 << width) - 1
    return np.array([(x >> (width * i)) & mask for i in range(L)], np.int64)


def from_limbs(a: np.ndarray, width: int = 32) -> int:
    out = 0
    for i in range(len(a) - 1, -1, -1):
        out = (out << width) | int(a[i])
    return out


@dataclass(frozen=True)
class BulkResult:
    numerators: list[int]
    statuses: list[int]
    completed: int
    simulated: int
    skipped: int
    max_numerator_bits: int
    violated: bool


class GossipAccelerator:
    """Bulk executor bound to one periodic schedule."""

    def __init__(self, schedule: EvolvingSchedule):
        self.schedule = schedule
        self.n = schedule.n
        self.period = schedule.period
        ptr = np.zeros((self.period, self.n + 1), np.int64)
        idx: list[int] = []
        for s in range(self.period):
            adj = schedule.graph_at(s).adjacency
            ptr[s, 0] = len(idx)
            for u in range(self.n):
                idx.extend(adj[u])
                ptr[s, u + 1] = len(idx)
        self.ptr = ptr
        self.idx = np.array(idx or [0], np.int64)
        # cycle checks happen at period boundaries, at most once per CHECK_EVERY rounds
        self.every = self.period * -(-CHECK_EVERY // self.period)
        self._memo: dict[tuple, BulkResult] = {}

    @staticmethod
    def supports(d: int) -> bool:
        return 2 <= d < MAX_D

    def run(self, numerators: list[int], statuses: list[int], d: int, pin: int, strict: bool,
            t0: int, rounds: int) -> BulkResult:
        if not self.supports(d):
            raise ValueError(f"share denominator {d} outside the accelerated range")
        key = (tuple(numerators), tuple(statuses), d, pin, strict, t0 % self.every, rounds)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        res = self._run(numerators, statuses, d, pin, strict, t0, rounds)
        if len(self._memo) >= MEMO_SIZE:
            self._memo.clear()
        self._memo[key] = res
        return res

    def _run(self, numerators: list[int], statuses: list[int], d: int, pin: int, strict: bool,
             t0: int, rounds: int) -> BulkResult:
        n = self.n
        ceiling = sum(numerators) + n * pin + 1
        width = limb_width(d)
        L = ceiling.bit_length() // width + 1
        N = np.stack([to_limbs(x, L, width) for x in numerators])
        S = np.array(statuses, np.int8)
        pin_limbs = to_limbs(pin, L, width)
        stats = np.zeros(4, np.int64)
        seen = np.zeros(L, np.int64)
        _bulk_kernel(N, S, pin_limbs, d, width, self.ptr, self.idx, self.period, self.every,
                     t0 % self.every, rounds, strict, stats, seen)
        return BulkResult(
            numerators=[from_limbs(N[u], width) for u in range(n)],
            statuses=[int(x) for x in S],
            completed=int(stats[0]),
            simulated=int(stats[1]),
            skipped=int(stats[2]),
            max_numerator_bits=from_limbs(seen, width).bit_length(),
            violated=bool(stats[3]),
        )
