"""Counting how many nodes hold a given message by potential averaging."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..errors import DegreeOverflowError, ProtocolViolation
from ..numerics import format_potential, update_numerator
from ..params import MultParams
from .base import AuditContext, GossipSegment, round_half_up
from .messages import Msg, Tag, potential_msg


@dataclass
class MultiplicityNode:
    """Holders start with potential 1, everyone else with 0.

    After the sharing rounds the node returns phi * n rounded to the nearest
    integer. `n` is the node's own belief about the system size.
    """

    holder: bool
    params: MultParams
    n: int | None = None
    phi: int = field(init=False)
    rnd: int = field(init=False, default=0)
    result: int | None = field(init=False, default=None)

    def __post_init__(self) -> None:
        if self.n is None:
            self.n = self.params.n
        self.phi = self.params.scale if self.holder else 0

    @property
    def terminal(self) -> bool:
        return self.result is not None

    def output(self) -> int | None:
        return self.result

    def message(self) -> Msg:
        return potential_msg(self.phi)

    def step(self, received: Sequence[Msg]) -> None:
        if self.terminal:
            raise ProtocolViolation("finished node stepped")
        d = self.params.d
        if 2 * len(received) >= d:
            raise DegreeOverflowError(f"{len(received)} neighbors with d={d}")
        for m in received:
            if m.tag != Tag.POTENTIAL:
                raise ProtocolViolation(f"unexpected message {m} while counting")
        self.phi = update_numerator(self.phi, (m.value for m in received), d)
        self.rnd += 1
        if self.rnd == self.params.rounds:
            self.result = round_half_up(self.phi, self.n, self.params.scale)

    def gossip_segment(self) -> GossipSegment | None:
        if self.terminal:
            return None
        p = self.params
        return GossipSegment(("mult", self.rnd), p.d, p.rounds - self.rnd, 0, True)

    def gossip_state(self) -> tuple[int, int]:
        return self.phi, 0

    def absorb_gossip(self, numerator: int, status: int, rounds: int) -> None:
        if status != 0 or self.rnd + rounds >= self.params.rounds:
            raise ProtocolViolation("bulk execution overran the counting rounds")
        self.phi = numerator
        self.rnd += rounds

    def audit_context(self) -> AuditContext:
        return AuditContext("multiplicity", 1, self.params.c, self.params.d)

    def describe(self) -> dict:
        p = self.params
        return {"epoch": None, "phase": None, "block": self.rnd // p.T,
                "round_in_phase": self.rnd, "phi": format_potential(self.phi, p.d, p.c),
                "status": None}
