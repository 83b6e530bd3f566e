"""Wire-level message values exchanged between anonymous nodes."""
from __future__ import annotations

from enum import IntEnum
from typing import NamedTuple


class Status(IntEnum):
    PROBING = 0
    LOW = 1
    HIGH = 2
    DONE = 3


class Tag(IntEnum):
    GOSSIP = 1  # potential numerator plus status (status travels in the wire tag)
    STATUS = 2
    BIT = 3
    POTENTIAL = 4


class Msg(NamedTuple):
    """One broadcast value. Tuples order naturally, so a received multiset is a sorted tuple."""

    tag: int
    status: int = 0
    value: int = 0


def gossip(status: int, numerator: int) -> Msg:
    return Msg(Tag.GOSSIP, status, numerator)


def status_msg(status: int) -> Msg:
    return Msg(Tag.STATUS, status, 0)


def bit_msg(bit: bool) -> Msg:
    return Msg(Tag.BIT, 0, int(bit))


def potential_msg(numerator: int) -> Msg:
    return Msg(Tag.POTENTIAL, 0, numerator)
