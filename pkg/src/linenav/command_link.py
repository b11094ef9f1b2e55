"""Byte framing for steering commands over a serial link.

Frame layout (6 bytes): start 0xAA, sequence, angle as signed 16-bit
centidegrees little-endian, flags (bit0 = valid), XOR checksum of the
five preceding bytes. A single-bit flip anywhere is caught by the start
byte or the checksum; a flip in the sequence field paired with the exactly
compensating checksum bit is the known undetectable (2-bit) case.
"""

from __future__ import annotations

import math
import struct

from .steering import SteeringCommand

START_BYTE = 0xAA
FRAME_LENGTH = 6


class FrameError(ValueError):
    """Base class for command-frame encode/decode failures."""


class FrameLengthError(FrameError):
    pass


class FrameStartError(FrameError):
    pass


class FrameChecksumError(FrameError):
    pass


class AngleRangeError(FrameError):
    """Angle does not fit the signed 16-bit centidegree field."""


def _checksum(payload: bytes) -> int:
    value = 0
    for b in payload:
        value ^= b
    return value


def encode_frame(cmd: SteeringCommand, seq: int) -> bytes:
    """Serialize a command; invalid commands carry a zero angle and clear bit0."""
    if not (0 <= seq <= 255):
        raise ValueError(f"sequence must fit one byte, got {seq}")
    if cmd.valid:
        centideg = int(math.floor(abs(cmd.angle_deg) * 100.0 + 0.5))
        if cmd.angle_deg < 0:
            centideg = -centideg
        if not (-32767 <= centideg <= 32767):
            raise AngleRangeError(f"angle {cmd.angle_deg} deg outside +/-327.67")
        flags = 0x01
    else:
        centideg = 0
        flags = 0x00
    body = bytes([START_BYTE, seq]) + struct.pack("<h", centideg) + bytes([flags])
    return body + bytes([_checksum(body)])


def decode_frame(data: bytes) -> tuple[SteeringCommand, int]:
    """Parse and verify one frame; inverse of encode_frame."""
    if len(data) != FRAME_LENGTH:
        raise FrameLengthError(f"frame must be {FRAME_LENGTH} bytes, got {len(data)}")
    if data[0] != START_BYTE:
        raise FrameStartError(f"bad start byte 0x{data[0]:02X}")
    if _checksum(data[:5]) != data[5]:
        raise FrameChecksumError("checksum mismatch")
    centideg = struct.unpack("<h", data[2:4])[0]
    valid = bool(data[4] & 0x01)
    return SteeringCommand(centideg / 100.0, valid), data[1]
