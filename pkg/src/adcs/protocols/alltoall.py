"""All-to-all delivery: count the nodes, then discover and count every distinct message.

Each epoch finds the largest not-yet-delivered message bit by bit (a 1 is
preferred whenever some matching node has it), then counts its holders.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..errors import ProtocolViolation
from ..params import MultParams, Reduction, broadcast_rounds, derive_mult_params
from .base import BOOLEAN_CONTEXT, AuditContext, GossipSegment
from .inputs import InputMessage, message_width
from .messages import Msg, Tag, bit_msg
from .multiplicity import MultiplicityNode
from .rmc import RmcNode


@dataclass
class AllToAllNode:
    supervisor: bool
    message_in: InputMessage
    ell: int
    T: int
    epsilon: int = 1
    i_min: Fraction | None = None
    reduction: Reduction | None = None

    stage: str = field(init=False, default="count")
    rmc: RmcNode = field(init=False)
    n_est: int | None = field(init=False, default=None)
    width: int = field(init=False, default=0)
    rprime: int = field(init=False, default=0)
    mult_params: MultParams | None = field(init=False, default=None)
    delivered: bool = field(init=False, default=False)
    match: bool = field(init=False, default=False)
    match0: bool = field(init=False, default=False)
    match1: bool = field(init=False, default=False)
    index: int = field(init=False, default=0)
    bit: int = field(init=False, default=0)
    new_message: str = field(init=False, default="")
    rcount: int = field(init=False, default=0)
    counter: MultiplicityNode | None = field(init=False, default=None)
    external_output: list[tuple[str, int]] = field(init=False, default_factory=list)
    epoch: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        self.rmc = RmcNode(self.supervisor, self.ell, self.T, self.epsilon, self.i_min,
                           self.reduction)

    @property
    def terminal(self) -> bool:
        return self.stage == "halted"

    def output(self) -> dict[str, int] | None:
        return dict(self.external_output) if self.terminal else None

    def message(self) -> Msg:
        if self.stage == "count":
            return self.rmc.message()
        if self.stage == "bcast1":
            return bit_msg(self.match1)
        if self.stage == "bcast0":
            return bit_msg(self.match0)
        if self.stage == "mult":
            return self.counter.message()
        raise ProtocolViolation("halted node asked to send")

    def step(self, received: Sequence[Msg]) -> None:
        if self.stage == "count":
            self.rmc.step(received)
            if self.rmc.terminal:
                self._counted(self.rmc.output())
        elif self.stage in ("bcast1", "bcast0"):
            for m in received:
                if m.tag != Tag.BIT:
                    raise ProtocolViolation(f"unexpected message {m} while broadcasting")
            heard = any(m.value for m in received)
            if self.stage == "bcast1":
                self.match1 = self.match1 or heard
            else:
                self.match0 = self.match0 or heard
            self.rcount += 1
            if self.rcount == self.rprime:
                self._broadcast_done()
        elif self.stage == "mult":
            self.counter.step(received)
            if self.counter.terminal:
                count = self.counter.output()
                if any(m == self.new_message for m, _ in self.external_output):
                    raise ProtocolViolation(f"message {self.new_message} discovered twice")
                self.external_output.append((self.new_message, count))
                self._start_epoch()
        else:
            raise ProtocolViolation("halted node stepped")

    def _counted(self, n: int) -> None:
        self.n_est = n
        self.width = message_width(n)
        if self.message_in.width > self.width:
            raise ProtocolViolation(
                f"input {self.message_in.bits} wider than {self.width} bits for n={n}")
        self.rprime = broadcast_rounds(n, self.T, self.i_min)
        self.mult_params = derive_mult_params(n, self.T, self.i_min, self.reduction)
        self._start_epoch()

    def _start_epoch(self) -> None:
        self.epoch += 1
        self.match = not self.delivered
        self.new_message = ""
        self.index = 1
        self._start_index()

    def _start_index(self) -> None:
        bits = self.message_in.bits.zfill(self.width)
        self.bit = int(bits[self.index - 1])
        self.match0 = self.match and self.bit == 0
        self.match1 = self.match and self.bit == 1
        self.stage = "bcast1"
        self.rcount = 0

    def _broadcast_done(self) -> None:
        if self.stage == "bcast1":
            if self.match1:
                self.new_message += "1"
                if self.bit == 0:
                    self.match = False
                self._next_index()
            else:
                self.stage = "bcast0"
                self.rcount = 0
            return
        if self.match0:
            self.new_message += "0"
            if self.bit == 1:
                self.match = False
            self._next_index()
        else:
            # nobody matches: every message has been delivered
            self.stage = "halted"

    def _next_index(self) -> None:
        self.index += 1
        if self.index <= self.width:
            self._start_index()
            return
        if self.match:
            self.delivered = True
        own = self.message_in.bits.zfill(self.width)
        self.counter = MultiplicityNode(own == self.new_message, self.mult_params, self.n_est)
        self.stage = "mult"

    # accelerated-executor hooks delegate to whichever sub-protocol is active

    def _active(self):
        if self.stage == "count":
            return self.rmc
        if self.stage == "mult":
            return self.counter
        return None

    def gossip_segment(self) -> GossipSegment | None:
        sub = self._active()
        return None if sub is None else sub.gossip_segment()

    def gossip_state(self) -> tuple[int, int]:
        return self._active().gossip_state()

    def absorb_gossip(self, numerator: int, status: int, rounds: int) -> None:
        self._active().absorb_gossip(numerator, status, rounds)

    def audit_context(self) -> AuditContext:
        sub = self._active()
        return BOOLEAN_CONTEXT if sub is None else sub.audit_context()

    def describe(self) -> dict:
        sub = self._active()
        if sub is not None:
            out = sub.describe()
        else:
            out = {"phase": self.index, "block": None, "round_in_phase": self.rcount,
                   "phi": None, "status": None}
        out["epoch"] = out.get("epoch") if self.stage == "count" else self.epoch
        out["stage"] = self.stage
        return out
