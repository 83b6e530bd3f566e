"""Flooding a boolean OR for a fixed number of rounds."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..errors import ProtocolViolation
from .base import BOOLEAN_CONTEXT, AuditContext
from .messages import Msg, Tag, bit_msg


@dataclass
class BroadcastNode:
    value: bool
    rounds: int
    rnd: int = field(init=False, default=0)

    @property
    def terminal(self) -> bool:
        return self.rnd >= self.rounds

    def output(self) -> bool:
        return self.value

    def message(self) -> Msg:
        return bit_msg(self.value)

    def step(self, received: Sequence[Msg]) -> None:
        for m in received:
            if m.tag != Tag.BIT:
                raise ProtocolViolation(f"unexpected message {m} while broadcasting")
        self.value = self.value or any(m.value for m in received)
        self.rnd += 1

    def gossip_segment(self) -> None:
        return None

    def gossip_state(self) -> tuple[int, int]:
        raise ProtocolViolation("broadcast has no potential")

    def absorb_gossip(self, numerator: int, status: int, rounds: int) -> None:
        raise ProtocolViolation("broadcast has no potential")

    def audit_context(self) -> AuditContext:
        return BOOLEAN_CONTEXT

    def describe(self) -> dict:
        return {"epoch": None, "phase": None, "block": None, "round_in_phase": self.rnd,
                "phi": None, "status": None}
