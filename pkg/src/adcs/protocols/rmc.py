"""Size discovery with supervisor nodes: per-node state machine.

Every node keeps an estimate k and runs one epoch per estimate: p phases of r
potential-sharing rounds, then d rounds of status dissemination. Supervisors
absorb potential at the end of each phase and judge the estimate from the
total they absorbed.
"""
from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..errors import ProtocolViolation
from ..numerics import format_potential, update_numerator
from ..params import Reduction, RmcParams, derive_rmc_params
from .base import AuditContext, GossipSegment
from .messages import Msg, Status, Tag, gossip, status_msg

log = logging.getLogger(__name__)

# Precedence when a node hears several verdicts in one dissemination round.
_VERDICT_RANK = {Status.LOW: 3, Status.HIGH: 2, Status.DONE: 1}


@dataclass
class EpochRecord:
    """Observations one node makes during one epoch (instrumentation only)."""

    k: int
    d: int
    c: int
    supervisor: bool
    phi_after_phase1: int | None = None
    status_after_phase2: Status | None = None
    rho: int | None = None
    verdict: Status | None = None
    final_status: Status | None = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "supervisor": self.supervisor,
            "phi_after_phase1": None if self.phi_after_phase1 is None
            else format_potential(self.phi_after_phase1, self.d, self.c),
            "status_after_phase2": None if self.status_after_phase2 is None
            else self.status_after_phase2.name.lower(),
            "rho": None if self.rho is None else format_potential(self.rho, self.d, self.c),
            "verdict": None if self.verdict is None else self.verdict.name.lower(),
            "final_status": None if self.final_status is None else self.final_status.name.lower(),
        }


@dataclass
class RmcNode:
    supervisor: bool
    ell: int
    T: int
    epsilon: int = 1
    i_min: Fraction | None = None
    reduction: Reduction | None = None

    k: int = field(init=False)
    lo: int = field(init=False)
    hi: int | None = field(init=False)
    status: Status = field(init=False)
    phi: int = field(init=False)
    rho: int = field(init=False)
    phase: int = field(init=False)
    rnd: int = field(init=False)
    dround: int = field(init=False)
    stage: str = field(init=False)
    epoch: int = field(init=False)
    records: list[EpochRecord] = field(init=False, default_factory=list)
    _params: RmcParams = field(init=False, repr=False)
    _record: EpochRecord = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.ell < 1:
            raise ValueError("need at least one supervisor")
        self.k = self.ell + 1
        self.lo = self.k
        self.hi = None
        self.epoch = 0
        self._start_epoch()

    @property
    def params(self) -> RmcParams:
        return self._params

    @property
    def terminal(self) -> bool:
        return self.stage == "halted"

    def output(self) -> int | None:
        return self.k if self.terminal else None

    def _start_epoch(self) -> None:
        self._params = derive_rmc_params(self.k, self.ell, self.T, self.epsilon, self.i_min,
                                         self.reduction)
        self.status = Status.PROBING
        self.phi = 0 if self.supervisor else self.ell * self._params.scale
        self.rho = 0
        self.phase = 1
        self.rnd = 0
        self.dround = 0
        self.stage = "gossip"
        self.epoch += 1
        self._record = EpochRecord(self.k, self._params.d, self._params.c, self.supervisor)

    def message(self) -> Msg:
        if self.stage == "gossip":
            return gossip(self.status, self.phi)
        if self.stage == "dissem":
            return status_msg(self.status)
        raise ProtocolViolation("halted node asked to send")

    def step(self, received: Sequence[Msg]) -> None:
        if self.stage == "gossip":
            self._gossip_round(received)
        elif self.stage == "dissem":
            self._dissemination_round(received)
        else:
            raise ProtocolViolation("halted node stepped")

    def _gossip_round(self, received: Sequence[Msg]) -> None:
        p = self._params
        all_probing = True
        for m in received:
            if m.tag != Tag.GOSSIP or m.status not in (Status.PROBING, Status.LOW):
                raise ProtocolViolation(f"unexpected message {m} during a sharing round")
            if m.status != Status.PROBING:
                all_probing = False
        if self.status == Status.PROBING and 2 * len(received) < p.d and all_probing:
            self.phi = update_numerator(self.phi, (m.value for m in received), p.d)
        else:
            self.status = Status.LOW
            self.phi = self.ell * p.scale
        self.rnd += 1
        if self.rnd == p.r:
            self._end_phase()

    def _end_phase(self) -> None:
        p = self._params
        rec = self._record
        if self.phase == 1:
            rec.phi_after_phase1 = self.phi
            if self.phi * p.tau.denominator > p.tau.numerator * p.scale:
                self.status = Status.LOW
                self.phi = self.ell * p.scale
        if self.supervisor and self.status == Status.PROBING:
            self.rho += self.phi
            self.phi = 0
        if self.phase == 2:
            rec.status_after_phase2 = self.status
        self.phase += 1
        self.rnd = 0
        if self.phase > p.p:
            if self.supervisor:
                rec.rho = self.rho
                if self.status == Status.PROBING:
                    self.status = self._verdict()
                    rec.verdict = self.status
            self.stage = "dissem"
            self.dround = 0

    def _verdict(self) -> Status:
        p = self._params
        kg = p.k**p.gamma
        base = p.k - p.ell
        # rho / scale compared with base * (1 -/+ k^-gamma), cleared of denominators
        lhs = self.rho * kg
        if lhs < base * (kg - 1) * p.scale:
            return Status.HIGH
        if lhs > base * (kg + 1) * p.scale:
            return Status.LOW
        return Status.DONE

    def _dissemination_round(self, received: Sequence[Msg]) -> None:
        for m in received:
            if m.tag != Tag.STATUS:
                raise ProtocolViolation(f"unexpected message {m} during dissemination")
        if not self.supervisor:
            heard = [Status(m.status) for m in received if m.status != Status.PROBING]
            if heard:
                self.status = max(heard, key=_VERDICT_RANK.__getitem__)
        self.dround += 1
        if self.dround == self._params.d:
            self._end_epoch()

    def _end_epoch(self) -> None:
        rec = self._record
        rec.final_status = self.status
        self.records.append(rec)
        if self.status == Status.DONE:
            self.stage = "halted"
            return
        if self.status == Status.LOW:
            self.lo = self.k + 1
            self.k = 2 * self.k if self.hi is None else (self.lo + self.hi) // 2
        elif self.status == Status.HIGH:
            self.hi = self.k - 1
            self.k = (self.lo + self.hi) // 2
        else:
            log.warning("epoch k=%d ended without a verdict; repeating it", self.k)
        if self.hi is not None and self.lo > self.hi:
            raise ProtocolViolation(f"empty estimate window [{self.lo}, {self.hi}]")
        self._start_epoch()

    # accelerated-executor hooks

    def gossip_segment(self) -> GossipSegment | None:
        if self.stage != "gossip":
            return None
        p = self._params
        return GossipSegment(("rmc", self.epoch, self.k, self.phase, self.rnd), p.d,
                             p.r - self.rnd, self.ell * p.scale, False)

    def gossip_state(self) -> tuple[int, int]:
        return self.phi, int(self.status)

    def absorb_gossip(self, numerator: int, status: int, rounds: int) -> None:
        if self.rnd + rounds >= self._params.r:
            raise ProtocolViolation("bulk execution may not cross a phase boundary")
        self.phi = numerator
        self.status = Status(status)
        self.rnd += rounds

    def audit_context(self) -> AuditContext:
        return AuditContext(f"rmc:k={self.k}", self.ell, self._params.c, self._params.d)

    def describe(self) -> dict:
        p = self._params
        return {
            "epoch": self.epoch,
            "phase": self.phase if self.stage == "gossip" else None,
            "block": self.rnd // p.T if self.stage == "gossip" else None,
            "round_in_phase": self.rnd if self.stage == "gossip" else self.dround,
            "phi": format_potential(self.phi, p.d, p.c),
            "status": self.status.name.lower(),
        }


def rmc_step(node: RmcNode, received: Sequence[Msg]) -> tuple[RmcNode, Msg]:
    """Pure form of one round: returns the successor state and its next message."""
    nxt = copy.deepcopy(node)
    nxt.step(tuple(sorted(received)))
    return nxt, (nxt.message() if not nxt.terminal else None)


def estimate_path(records: Sequence[EpochRecord]) -> list[tuple[int, str]]:
    return [(r.k, r.final_status.name.lower()) for r in records]


def round_bound(path: Sequence[int], ell: int, T: int, epsilon: int = 1,
                i_min: Fraction | None = None, reduction: Reduction | None = None) -> int:
    """Sum over the visited estimates of p*r + d."""
    return sum(derive_rmc_params(k, ell, T, epsilon, i_min, reduction).epoch_rounds
               for k in path)
