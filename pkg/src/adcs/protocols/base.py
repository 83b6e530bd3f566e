"""Contract between node state machines and the round engine."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, NamedTuple, Protocol, Sequence

from ..exactmath import ceil_log2
from .messages import Msg


class AuditContext(NamedTuple):
    """Scale in force when a message is sent; fixes its congestion bound."""

    label: str
    ell: int
    c: int
    d: int

    @property
    def bound(self) -> int:
        return 4 + ceil_log2(self.ell) + self.c * ceil_log2(self.d) + 8


BOOLEAN_CONTEXT = AuditContext("broadcast", 1, 0, 2)


@dataclass(frozen=True)
class GossipSegment:
    """A stretch of potential-sharing rounds every node executes in lockstep.

    The accelerated executor may run all but the last of `rounds_left` rounds
    in bulk; the final round always goes through the node's own step so that
    end-of-phase logic stays in one place.
    """

    key: tuple
    d: int
    rounds_left: int
    pin: int
    strict: bool


class Node(Protocol):
    @property
    def terminal(self) -> bool: ...

    def message(self) -> Msg: ...

    def step(self, received: Sequence[Msg]) -> None: ...

    def output(self) -> Any: ...

    def gossip_segment(self) -> GossipSegment | None: ...

    def gossip_state(self) -> tuple[int, int]: ...

    def absorb_gossip(self, numerator: int, status: int, rounds: int) -> None: ...

    def audit_context(self) -> AuditContext: ...

    def describe(self) -> dict: ...


def round_half_up(numerator: int, n: int, scale: int) -> int:
    """Nearest integer to numerator * n / scale, ties rounded up."""
    return (2 * numerator * n + scale) // (2 * scale)
