"""Synchronous round engine for anonymous nodes.

Each round every active node emits one message; every node then receives the
sorted multiset of its current neighbors' messages (no sender identities) and
all nodes step together.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import IO, Any, Iterable, Sequence

from . import codec
from .errors import CongestionViolation, RoundCapExceeded
from .fastgossip import GossipAccelerator
from .protocols.base import AuditContext, Node
from .protocols.messages import Msg
from .schedules import EvolvingSchedule

log = logging.getLogger(__name__)

DEFAULT_ROUND_CAP = 10**18
MAX_LOGGED_VIOLATIONS = 100


@dataclass(frozen=True)
class TraceRecord:
    round: int
    node: int
    epoch: int | None
    phase: int | None
    block: int | None
    round_in_phase: int | None
    context: str
    sent: str | None
    bits: int
    received_count: int
    phi: str | None
    status: str | None

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> TraceRecord:
        return cls(**json.loads(line))


@dataclass
class AuditEntry:
    label: str
    bound: int
    max_bits: int = 0
    messages: int = 0
    violations: int = 0


@dataclass
class AuditReport:
    entries: dict[str, AuditEntry] = field(default_factory=dict)
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.violations == 0 for e in self.entries.values())

    @property
    def max_bits(self) -> int:
        return max((e.max_bits for e in self.entries.values()), default=0)

    def record(self, ctx: AuditContext, bits: int, count: int = 1,
               where: tuple[int, int] | None = None) -> bool:
        entry = self.entries.get(ctx.label)
        if entry is None:
            entry = self.entries[ctx.label] = AuditEntry(ctx.label, ctx.bound)
        entry.messages += count
        entry.max_bits = max(entry.max_bits, bits)
        if bits > entry.bound:
            entry.violations += 1
            if len(self.violations) < MAX_LOGGED_VIOLATIONS:
                rnd, node = where if where is not None else (None, None)
                self.violations.append({"round": rnd, "node": node, "context": ctx.label,
                                        "bits": bits, "bound": entry.bound})
            return False
        return True

    def to_dict(self) -> dict:
        return {"ok": self.ok, "max_bits": self.max_bits,
                "entries": {k: asdict(v) for k, v in sorted(self.entries.items())},
                "violations": self.violations}


def audit_congestion(trace: Iterable[TraceRecord],
                     contexts: dict[str, AuditContext]) -> AuditReport:
    """Check every traced message against the bound of the parameters it was sent under."""
    report = AuditReport()
    for rec in trace:
        if rec.sent is None:
            continue
        report.record(contexts[rec.context], rec.bits, where=(rec.round, rec.node))
    return report


@dataclass
class RunResult:
    outputs: list[Any]
    rounds: int
    max_message_bits: int
    schedule_kind: str
    schedule_seed: int
    schedule_fingerprint: str
    audit: AuditReport
    contexts: dict[str, AuditContext]
    estimate_path: list[tuple[int, str]] = field(default_factory=list)
    trace: list[TraceRecord] | None = None
    bulk_rounds: int = 0
    simulated_rounds: int = 0
    skipped_rounds: int = 0

    def summary(self) -> dict:
        return {
            "outputs": self.outputs,
            "rounds": self.rounds,
            "max_message_bits": self.max_message_bits,
            "estimate_path": [list(x) for x in self.estimate_path],
            "schedule": {"kind": self.schedule_kind, "seed": self.schedule_seed,
                         "fingerprint": self.schedule_fingerprint},
            "audit": self.audit.to_dict(),
        }

    def execution(self) -> dict:
        """How the rounds were executed; varies with tracing, so kept out of summary()."""
        return {"bulk_rounds": self.bulk_rounds, "simulated_rounds": self.simulated_rounds,
                "skipped_rounds": self.skipped_rounds}


class Engine:
    """Runs one protocol instance over one schedule."""

    def __init__(self, schedule: EvolvingSchedule, *, accelerate: bool = True):
        self.schedule = schedule
        self.accelerate = accelerate
        self._accel: GossipAccelerator | None = None

    def _accelerator(self) -> GossipAccelerator:
        if self._accel is None:
            self._accel = GossipAccelerator(self.schedule)
        return self._accel

    def run(self, nodes: Sequence[Node], round_cap: int = DEFAULT_ROUND_CAP, *, start: int = 0,
            trace: bool = False, trace_sink: IO[str] | None = None,
            strict_audit: bool = False) -> RunResult:
        if round_cap < 1:
            raise ValueError("round_cap must be >= 1")
        if len(nodes) != self.schedule.n:
            raise ValueError(f"{len(nodes)} nodes for a schedule on {self.schedule.n}")
        n = len(nodes)
        records: list[TraceRecord] | None = [] if trace else None
        tracing = trace or trace_sink is not None
        audit = AuditReport()
        contexts: dict[str, AuditContext] = {}
        rounds = 0
        bulk = simulated = skipped = 0

        def check(ctx: AuditContext, bits: int, count: int, where: tuple[int, int] | None):
            contexts[ctx.label] = ctx
            if not audit.record(ctx, bits, count, where) and strict_audit:
                raise CongestionViolation(
                    f"{bits}-bit message exceeds bound {ctx.bound} under {ctx.label}",
                    bits, ctx.bound)

        while not all(nd.terminal for nd in nodes):
            if rounds >= round_cap:
                raise RoundCapExceeded(f"round cap {round_cap} reached", rounds, records)
            t = start + rounds
            if self.accelerate and not tracing:
                done = self._bulk(nodes, t, round_cap - rounds, check)
                if done:
                    rounds += done[0]
                    bulk += done[0]
                    simulated += done[1]
                    skipped += done[2]
                    continue
            graph = self.schedule.graph_at(t)
            msgs: list[Msg | None] = [None if nd.terminal else nd.message() for nd in nodes]
            for u, nd in enumerate(nodes):
                if msgs[u] is None:
                    continue
                bits = codec.message_width(msgs[u])
                ctx = nd.audit_context()
                if tracing:
                    info = nd.describe()
                    value, width = codec.encode(msgs[u])
                    rec = TraceRecord(
                        round=t, node=u, epoch=info.get("epoch"), phase=info.get("phase"),
                        block=info.get("block"), round_in_phase=info.get("round_in_phase"),
                        context=ctx.label, sent=codec.to_hex(value, width), bits=width,
                        received_count=sum(1 for v in graph.adjacency[u] if msgs[v] is not None),
                        phi=info.get("phi"), status=info.get("status"))
                    if records is not None:
                        records.append(rec)
                    if trace_sink is not None:
                        trace_sink.write(rec.to_json() + "\n")
                check(ctx, bits, 1, (t, u))
            inbox = [tuple(sorted(msgs[v] for v in graph.adjacency[u] if msgs[v] is not None))
                     for u in range(n)]
            for u, nd in enumerate(nodes):
                if not nd.terminal:
                    nd.step(inbox[u])
            rounds += 1
            simulated += 1

        return RunResult(
            outputs=[nd.output() for nd in nodes],
            rounds=rounds,
            max_message_bits=audit.max_bits,
            schedule_kind=self.schedule.kind,
            schedule_seed=self.schedule.seed,
            schedule_fingerprint=self.schedule.fingerprint,
            audit=audit,
            contexts=contexts,
            trace=records,
            bulk_rounds=bulk,
            simulated_rounds=simulated,
            skipped_rounds=skipped,
        )

    def _bulk(self, nodes: Sequence[Node], t: int, budget: int, check) -> tuple[int, int, int] | None:
        """Run a shared sharing stretch in bulk; None when not applicable."""
        if any(nd.terminal for nd in nodes):
            return None
        segs = [nd.gossip_segment() for nd in nodes]
        seg = segs[0]
        if seg is None or any(s != seg for s in segs) or not GossipAccelerator.supports(seg.d):
            return None
        count = min(seg.rounds_left - 1, budget)
        if count < 1:
            return None
        states = [nd.gossip_state() for nd in nodes]
        nums = [s[0] for s in states]
        stats = [s[1] for s in states]
        res = self._accelerator().run(nums, stats, seg.d, seg.pin, seg.strict, t, count)
        if res.completed == 0:
            return None
        ctx = nodes[0].audit_context()
        first = max(x.bit_length() for x in nums)
        probe = nodes[0].message()
        bits = codec.width_for(probe.tag, max(first, res.max_numerator_bits))
        check(ctx, bits, res.completed * len(nodes), None)
        for nd, num, st in zip(nodes, res.numerators, res.statuses):
            nd.absorb_gossip(num, st, res.completed)
        return res.completed, res.simulated, res.skipped


def run(nodes: Sequence[Node], schedule: EvolvingSchedule, round_cap: int = DEFAULT_ROUND_CAP,
        **kwargs) -> RunResult:
    accelerate = kwargs.pop("accelerate", True)
    return Engine(schedule, accelerate=accelerate).run(nodes, round_cap, **kwargs)
