"""Frame format and multiband stream striping.

Frame layout (bit-exact, MSB-first):

    preamble  64 QAM symbols, fixed sequence (see preamble_symbols)
    sfd       16 bits, 0xB7A0
    length    16-bit unsigned payload byte count
    payload   length bytes
    crc       CRC-32 over length + payload bytes

The preamble uses only the four corner points (+/-3 +/-3j)/sqrt(10), keyed
by the length-63 maximal-length sequence of x^6 + x^5 + 1 seeded 0b111111:
symbol k takes its I sign from bit k and its Q sign from bit (k+1) mod 63,
and the 64th symbol repeats the first.
"""
from __future__ import annotations

import numpy as np

from .core import MbnfcError, crc32, pack_bits, unpack_bits
from .modem import QAM_SCALE, map_bits

SFD = 0xB7A0
SFD_BITS = 16
LENGTH_BITS = 16
CRC_BITS = 32
PREAMBLE_LEN = 64
MAX_PAYLOAD = 65535


class FrameError(MbnfcError):
    pass


class BadSfdError(FrameError):
    pass


class FrameLengthError(FrameError):
    pass


class CrcMismatchError(FrameError):
    pass


class StreamLengthError(MbnfcError):
    pass


def mls63() -> np.ndarray:
    """Length-63 maximal-length sequence from x^6 + x^5 + 1, seed 0b111111."""
    state = 0b111111
    bits = np.empty(63, dtype=np.uint8)
    for k in range(63):
        bits[k] = state & 1
        fb = ((state >> 5) ^ (state >> 4)) & 1
        state = ((state << 1) | fb) & 0b111111
    return bits


_PREAMBLE: np.ndarray | None = None


def preamble_symbols() -> np.ndarray:
    """The fixed 64-symbol synchronization preamble."""
    global _PREAMBLE
    if _PREAMBLE is None:
        bits = mls63()
        i = np.where(bits, 3.0, -3.0)
        q = np.where(np.roll(bits, -1), 3.0, -3.0)
        syms = (i + 1j * q) * QAM_SCALE
        _PREAMBLE = np.concatenate([syms, syms[:1]])
    return _PREAMBLE.copy()


def int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> (width - 1 - k)) & 1 for k in range(width)],
                    dtype=np.uint8)


def frame_bits(payload: bytes) -> np.ndarray:
    """SFD + length + payload + CRC as an MSB-first bit array."""
    if len(payload) > MAX_PAYLOAD:
        raise FrameError(f"payload exceeds {MAX_PAYLOAD} bytes")
    body = len(payload).to_bytes(2, "big") + payload
    crc = crc32(body)
    parts = [int_to_bits(SFD, SFD_BITS),
             unpack_bits(body, 8 * len(body)),
             int_to_bits(crc, CRC_BITS)]
    return np.concatenate(parts)


def frame_symbol_count(payload_len: int) -> int:
    return PREAMBLE_LEN + (SFD_BITS + LENGTH_BITS + 8 * payload_len
                           + CRC_BITS) // 4


def frame_encode(payload: bytes) -> np.ndarray:
    """Encode a payload into the full QAM symbol sequence (preamble first)."""
    return np.concatenate([preamble_symbols(), map_bits(frame_bits(payload))])


def bits_to_int(bits: np.ndarray) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def frame_decode(bits) -> bytes:
    """Decode the post-preamble bit stream back into the payload.

    Raises BadSfdError, FrameLengthError or CrcMismatchError as distinct
    failure modes.
    """
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.size < SFD_BITS + LENGTH_BITS:
        raise FrameLengthError("bit stream shorter than the frame header")
    if bits_to_int(arr[:SFD_BITS]) != SFD:
        raise BadSfdError("start-of-frame delimiter not found")
    length = bits_to_int(arr[SFD_BITS:SFD_BITS + LENGTH_BITS])
    end = SFD_BITS + LENGTH_BITS + 8 * length + CRC_BITS
    if arr.size < end:
        raise FrameLengthError(
            f"frame advertises {length} payload bytes but the stream is short")
    body_bits = arr[SFD_BITS:SFD_BITS + LENGTH_BITS + 8 * length]
    body = pack_bits(body_bits)
    crc_rx = bits_to_int(arr[end - CRC_BITS:end])
    if crc32(body) != crc_rx:
        raise CrcMismatchError("frame CRC mismatch")
    return body[2:]


def split_stream(data: bytes, n_bands: int) -> list[bytes]:
    """Byte-wise round-robin striping: byte i goes to band i mod n_bands."""
    if n_bands < 1:
        raise ValueError("n_bands must be >= 1")
    return [bytes(data[i::n_bands]) for i in range(n_bands)]


def merge_streams(streams: list[bytes]) -> bytes:
    """Exact inverse of split_stream."""
    if not streams:
        raise StreamLengthError("no streams to merge")
    lengths = [len(s) for s in streams]
    total = sum(lengths)
    base = total // len(streams)
    for i, n in enumerate(lengths):
        expect = base + (1 if i < total - base * len(streams) else 0)
        if n != expect:
            raise StreamLengthError(
                "stream lengths are not round-robin consistent")
    out = bytearray(total)
    for i, s in enumerate(streams):
        out[i::len(streams)] = s
    return bytes(out)
