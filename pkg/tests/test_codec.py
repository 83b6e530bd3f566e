from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from adcs import codec
from adcs.protocols.messages import Msg, Status, Tag, bit_msg, gossip, potential_msg, status_msg

statuses = st.sampled_from(list(Status))
messages = st.one_of(
    st.builds(gossip, statuses, st.integers(0, 2**600)),
    st.builds(status_msg, statuses),
    st.builds(bit_msg, st.booleans()),
    st.builds(potential_msg, st.integers(0, 2**600)),
)


@given(messages)
def test_round_trip(msg):
    value, width = codec.encode(msg)
    assert value < 1 << width
    assert codec.decode(value, width) == msg


@given(messages)
def test_width_layout(msg):
    w = codec.message_width(msg)
    pot = 8 * max(1, (msg.value.bit_length() + 7) // 8)
    expected = {Tag.GOSSIP: 4 + pot, Tag.STATUS: 6, Tag.BIT: 5, Tag.POTENTIAL: 4 + pot}
    assert w == expected[msg.tag]


def test_hex_is_zero_padded():
    value, width = codec.encode(bit_msg(False))
    assert codec.to_hex(value, width) == "06"


def test_gossip_status_lives_in_tag():
    value, width = codec.encode(gossip(Status.HIGH, 1))
    assert width == 12 and value >> 8 == codec.GOSSIP_BASE + Status.HIGH


@given(st.integers(1, 7), st.integers(1, 60), st.integers(2, 2**12), st.integers(0, 3))
def test_gossip_fits_audit_bound_below_twice_ell_scale(ell, c, d, slack):
    # any numerator below 2 * ell * d^c fits 4 + ceil(log ell) + c * ceil(log d) + 8
    numerator = 2 * ell * d**c - 1 - slack
    bound = 4 + (ell - 1).bit_length() + c * (d - 1).bit_length() + 8
    assert codec.message_width(gossip(Status.LOW, numerator)) <= bound


def test_unknown_tag_rejected():
    import pytest
    with pytest.raises(ValueError):
        codec.width_for(9)
    with pytest.raises(ValueError):
        codec.message_width(Msg(0, 0, 0))
    with pytest.raises(ValueError):
        codec.decode(0xF0, 8)
