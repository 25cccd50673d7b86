"""Wire format of the sleep and xsleep information elements.

Both IEs use the 802.15.4 header-IE descriptor: a little-endian 16-bit word
with bits 0-6 holding the content length, bits 7-14 the element ID and bit 15
the type (0). The content follows:

    sleep   1 octet   bits 0-5 n_slp, bits 6-7 reserved
    xsleep  3 octets  little-endian, bits 0-11 n_slp, 12-17 n_snz, 18-23 reserved

Reserved bits are written as zero and ignored when decoding.
"""

from __future__ import annotations

from .model import CommandKind, SleepCommand

SLEEP_IE_ID = 0x2A
XSLEEP_IE_ID = 0x2B

SLEEP_CONTENT_LEN = 1
XSLEEP_CONTENT_LEN = 3
HEADER_LEN = 2


class IeDecodeError(ValueError):
    pass


class TruncatedIe(IeDecodeError):
    pass


class UnknownElementId(IeDecodeError):
    pass


class LengthMismatch(IeDecodeError):
    pass


class InvalidCommand(IeDecodeError):
    pass


def _header(element_id: int, length: int) -> bytes:
    return (length | (element_id << 7)).to_bytes(2, "little")


def encode_sleep(cmd: SleepCommand) -> bytes:
    if cmd.kind is not CommandKind.BASIC:
        raise ValueError("encode_sleep takes a basic sleep command")
    if not 0 <= cmd.n_slp <= 0x3F:
        raise ValueError(f"n_slp out of range: {cmd.n_slp}")
    return _header(SLEEP_IE_ID, SLEEP_CONTENT_LEN) + bytes([cmd.n_slp])


def encode_xsleep(cmd: SleepCommand) -> bytes:
    if cmd.kind is not CommandKind.EXTENDED:
        raise ValueError("encode_xsleep takes an extended sleep command")
    content = cmd.n_slp | (cmd.n_snz << 12)
    return _header(XSLEEP_IE_ID, XSLEEP_CONTENT_LEN) + content.to_bytes(3, "little")


def encode(cmd: SleepCommand) -> bytes:
    if cmd.kind is CommandKind.BASIC:
        return encode_sleep(cmd)
    return encode_xsleep(cmd)


def decode_ie(data: bytes) -> SleepCommand:
    """Parse one sleep/xsleep IE. Trailing octets are not allowed."""
    data = bytes(data)
    if len(data) < HEADER_LEN:
        raise TruncatedIe(f"need {HEADER_LEN} header octets, got {len(data)}")
    word = int.from_bytes(data[:2], "little")
    length = word & 0x7F
    element_id = (word >> 7) & 0xFF
    if word >> 15:
        raise UnknownElementId("payload IE descriptors are not sleep IEs")
    if element_id == SLEEP_IE_ID:
        expected = SLEEP_CONTENT_LEN
    elif element_id == XSLEEP_IE_ID:
        expected = XSLEEP_CONTENT_LEN
    else:
        raise UnknownElementId(f"element id 0x{element_id:02X}")
    if length != expected:
        raise LengthMismatch(
            f"element 0x{element_id:02X} declares {length} octets, expected {expected}"
        )
    content = data[HEADER_LEN:]
    if len(content) < length:
        raise TruncatedIe(f"content has {len(content)} of {length} octets")
    if len(content) > length:
        raise LengthMismatch(f"{len(content) - length} trailing octets")

    if element_id == SLEEP_IE_ID:
        return SleepCommand.basic(content[0] & 0x3F)
    value = int.from_bytes(content, "little")
    n_slp = value & 0xFFF
    n_snz = (value >> 12) & 0x3F
    try:
        return SleepCommand.extended(n_slp, n_snz)
    except ValueError as exc:
        raise InvalidCommand(str(exc)) from None
