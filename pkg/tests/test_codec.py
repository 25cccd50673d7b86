import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsch_ls.codec import (
    InvalidCommand,
    LengthMismatch,
    TruncatedIe,
    UnknownElementId,
    decode_ie,
    encode,
    encode_sleep,
    encode_xsleep,
)
from tsch_ls.model import FrameSpec, SleepCommand


def pack_lsb_first(fields):
    """Reference bit packer: fields are (value, width) pairs, LSB first."""
    bits = []
    for value, width in fields:
        bits += [(value >> i) & 1 for i in range(width)]
    assert len(bits) % 8 == 0
    return bytes(
        sum(bit << i for i, bit in enumerate(bits[k : k + 8])) for k in range(0, len(bits), 8)
    )


def reference_sleep(n_slp):
    return pack_lsb_first([(1, 7), (0x2A, 8), (0, 1), (n_slp, 6), (0, 2)])


def reference_xsleep(n_slp, n_snz):
    return pack_lsb_first([(3, 7), (0x2B, 8), (0, 1), (n_slp, 12), (n_snz, 6), (0, 6)])


GOLDEN = [
    (SleepCommand.basic(13), bytes([0x01, 0x15, 0x0D])),
    (SleepCommand.basic(0), bytes([0x01, 0x15, 0x00])),
    (SleepCommand.basic(63), bytes([0x01, 0x15, 0x3F])),
    (SleepCommand.extended(296, 13), bytes([0x83, 0x15, 0x28, 0xD1, 0x00])),
    (SleepCommand.extended(0, 0), bytes([0x83, 0x15, 0x00, 0x00, 0x00])),
    (SleepCommand.extended(58, 3), bytes([0x83, 0x15, 0x3A, 0x30, 0x00])),
]


@pytest.mark.parametrize("cmd, wire", GOLDEN)
def test_golden_vectors(cmd, wire):
    assert encode(cmd) == wire
    assert decode_ie(wire) == cmd


def test_golden_vectors_match_reference_packer():
    for cmd, wire in GOLDEN:
        if cmd.kind.value == "basic":
            assert reference_sleep(cmd.n_slp) == wire
        else:
            assert reference_xsleep(cmd.n_slp, cmd.n_snz) == wire


def test_basic_exhaustive():
    for n in range(64):
        wire = encode_sleep(SleepCommand.basic(n))
        assert wire == reference_sleep(n)
        assert len(wire) == FrameSpec().sleep_ie_bytes
        assert decode_ie(wire) == SleepCommand.basic(n)


valid_xsleep = st.integers(1, 4095).flatmap(
    lambda s: st.tuples(st.just(s), st.integers(0, min(63, s - 1)))
)


@given(valid_xsleep)
def test_xsleep_roundtrip(pair):
    n_slp, n_snz = pair
    cmd = SleepCommand.extended(n_slp, n_snz)
    wire = encode_xsleep(cmd)
    assert wire == reference_xsleep(n_slp, n_snz)
    assert len(wire) == FrameSpec().xsleep_ie_bytes
    assert decode_ie(wire) == cmd


@given(st.integers(0, 63), st.integers(0, 3))
def test_basic_reserved_bits_ignored(n, reserved):
    wire = bytearray(encode_sleep(SleepCommand.basic(n)))
    wire[2] |= reserved << 6
    assert decode_ie(bytes(wire)) == SleepCommand.basic(n)


@given(valid_xsleep, st.integers(0, 63))
def test_xsleep_reserved_bits_ignored(pair, reserved):
    wire = bytearray(encode_xsleep(SleepCommand.extended(*pair)))
    wire[4] |= reserved << 2
    assert decode_ie(bytes(wire)) == SleepCommand.extended(*pair)


@pytest.mark.parametrize(
    "wire, error",
    [
        (bytes([0x01, 0x15]), TruncatedIe),
        (bytes([0x01]), TruncatedIe),
        (b"", TruncatedIe),
        (bytes([0x83, 0x15, 0x28, 0xD1]), TruncatedIe),
        (bytes([0x01, 0x16, 0x00]), UnknownElementId),  # element id 0x2C
        (bytes([0x01, 0x95, 0x00]), UnknownElementId),  # type bit set
        (bytes([0x02, 0x15, 0x00, 0x00]), LengthMismatch),
        (bytes([0x01, 0x15, 0x00, 0x00]), LengthMismatch),
        (bytes([0x83, 0x15, 0x05, 0x50, 0x00]), InvalidCommand),  # n_slp 5, n_snz 5
        (bytes([0x83, 0x15, 0x00, 0x10, 0x00]), InvalidCommand),  # n_slp 0, n_snz 1
    ],
)
def test_decode_errors(wire, error):
    with pytest.raises(error):
        decode_ie(wire)


def test_encoder_kind_checks():
    with pytest.raises(ValueError):
        encode_sleep(SleepCommand.extended(5, 1))
    with pytest.raises(ValueError):
        encode_xsleep(SleepCommand.basic(5))
