"""Bit-level message serialization used for congestion auditing.

Layout: a 4-bit tag, then the payload. A status message carries the status in
2 bits, a boolean takes 1 bit, and a potential numerator its minimal
big-endian byte string (scale implied by the sender's current parameters).
Gossip messages fold their status into the tag (GOSSIP_BASE + status), so the
payload is just the numerator bytes.
"""
from __future__ import annotations

from .numerics import potential_bits
from .protocols.messages import Msg, Status, Tag

TAG_BITS = 4
STATUS_BITS = 2
GOSSIP_BASE = 8


def width_for(tag: int, numerator_bits: int = 0) -> int:
    """Serialized width given the tag and the numerator's bit length."""
    pot = 8 * max(1, (numerator_bits + 7) // 8)
    if tag in (Tag.GOSSIP, Tag.POTENTIAL):
        return TAG_BITS + pot
    if tag == Tag.STATUS:
        return TAG_BITS + STATUS_BITS
    if tag == Tag.BIT:
        return TAG_BITS + 1
    raise ValueError(f"unknown tag {tag}")


def message_width(msg: Msg) -> int:
    return width_for(msg.tag, msg.value.bit_length())


def encode(msg: Msg) -> tuple[int, int]:
    """Return (bits as an integer, width)."""
    width = message_width(msg)
    body = width - TAG_BITS
    wire_tag = msg.tag
    if msg.tag == Tag.GOSSIP:
        wire_tag = GOSSIP_BASE + msg.status
        payload = msg.value
    elif msg.tag == Tag.STATUS:
        payload = msg.status
    else:
        payload = msg.value
    return (wire_tag << body) | payload, width


def decode(bits: int, width: int) -> Msg:
    body = width - TAG_BITS
    tag = bits >> body
    payload = bits & ((1 << body) - 1)
    if GOSSIP_BASE <= tag < GOSSIP_BASE + len(Status):
        return Msg(Tag.GOSSIP, tag - GOSSIP_BASE, payload)
    if tag == Tag.STATUS:
        return Msg(Tag.STATUS, payload, 0)
    if tag in (Tag.BIT, Tag.POTENTIAL):
        return Msg(tag, 0, payload)
    raise ValueError(f"unknown tag {tag}")


def to_hex(bits: int, width: int) -> str:
    return format(bits, f"0{(width + 3) // 4}x")
