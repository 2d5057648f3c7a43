"""Length framing, symbol packing, and the on-disk container.

Container v1 layout (little-endian lengths, MSB-first bit order):

    magic "AIFV" | version u8 | arity u8 | family u8 | framing-mode u8
    code-section  : u32 byte length, then the canonical code JSON
    length frame  : (mode 0 only) u8 byte length, then the Elias-delta
                    codeword of message_length + 1, zero-padded to bytes
    payload       : u32 count, then the packed code symbols; the count is
                    bits for binary codes, symbols-one-per-byte otherwise

Mode 0 frames the message length; mode 1 instead appends a dedicated EOF
symbol, which must sit on a leaf of every tree of the code. The recorded
payload count is what lets the decoder ignore the zero padding exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .codec import Decoder, SymbolStream, codeword_table, encode
from .errors import (
    BadMagic,
    InvalidPrefix,
    InvalidTree,
    SymbolOutOfRange,
    TruncatedStream,
    UnknownSymbol,
    VersionMismatch,
)
from .model import AifvCode, deserialize_code, serialize_code

MAGIC = b"AIFV"
VERSION = 1
MODE_LENGTH = 0
MODE_EOF = 1
_FAMILY_TAGS = {"binary": 0, "ternary": 1, "kary": 2}


# ---------------------------------------------------------------------------
# Elias delta


def elias_delta_encode(n: int) -> str:
    """Bit string of the Elias-delta codeword for n >= 1."""
    if n < 1:
        raise ValueError(f"Elias delta is defined for n >= 1, got {n}")
    length = n.bit_length()
    gamma = "0" * (length.bit_length() - 1) + bin(length)[2:]
    return gamma + bin(n)[3:]


def _read_delta(bits: str, pos: int) -> tuple[int, int]:
    zeros = 0
    while pos + zeros < len(bits) and bits[pos + zeros] == "0":
        zeros += 1
    head = pos + zeros
    if head + zeros + 1 > len(bits):
        raise InvalidPrefix("bit string ends inside an Elias-delta codeword")
    length = int(bits[head:head + zeros + 1], 2)
    body_start = head + zeros + 1
    body_end = body_start + length - 1
    if body_end > len(bits):
        raise InvalidPrefix("bit string ends inside an Elias-delta codeword")
    n = (1 << (length - 1)) + (int(bits[body_start:body_end], 2) if length > 1 else 0)
    return n, body_end


def elias_delta_decode(bits: str) -> int:
    """Inverse of elias_delta_encode; the whole string must be one codeword."""
    n, end = _read_delta(bits, 0)
    if end != len(bits):
        raise InvalidPrefix(f"{len(bits) - end} trailing bits after the codeword")
    return n


# ---------------------------------------------------------------------------
# Symbol packing


def _bits_to_bytes(bits: Sequence[int]) -> bytes:
    out = bytearray((len(bits) + 7) // 8)
    for i, bit in enumerate(bits):
        if bit:
            out[i >> 3] |= 0x80 >> (i & 7)
    return bytes(out)


def _bytes_to_bits(data: bytes, count: int) -> list[int]:
    if count > len(data) * 8:
        raise TruncatedStream(f"{count} bits requested from {len(data)} bytes")
    return [(data[i >> 3] >> (7 - (i & 7))) & 1 for i in range(count)]


def pack_symbols(symbols: Sequence[int], arity: int) -> tuple[bytes, int]:
    """(bytes, recorded count). Binary: MSB-first bits, zero-padded final
    byte. K >= 3: one ASCII digit per byte (v1 supports K <= 10)."""
    for s in symbols:
        if not (0 <= s < arity):
            raise SymbolOutOfRange(f"symbol {s} outside 0..{arity - 1}")
    if arity == 2:
        return _bits_to_bytes(list(symbols)), len(symbols)
    if arity > 10:
        raise SymbolOutOfRange("v1 packs one decimal digit per byte; arity > 10 unsupported")
    return bytes(0x30 + s for s in symbols), len(symbols)


def unpack_symbols(data: bytes, arity: int, count: int) -> list[int]:
    if arity == 2:
        return _bytes_to_bits(data, count)
    if count > len(data):
        raise TruncatedStream(f"{count} symbols requested from {len(data)} bytes")
    out = []
    for b in data[:count]:
        s = b - 0x30
        if not (0 <= s < arity):
            raise SymbolOutOfRange(f"byte {b:#04x} is not a code symbol below {arity}")
        out.append(s)
    return out


# ---------------------------------------------------------------------------
# Container


@dataclass(frozen=True)
class ParsedContainer:
    code: AifvCode
    mode: int
    eof_symbol: Optional[str]
    message: list[str]


def _check_eof_symbol(code: AifvCode, eof_symbol: str) -> None:
    table = codeword_table(code)
    for entries in table.entries:
        if eof_symbol not in entries:
            raise UnknownSymbol(f"EOF symbol {eof_symbol!r} missing from the code")
        if entries[eof_symbol].children_count != 0:
            raise InvalidTree("the EOF symbol must sit on a leaf in every tree")


def write_container(
    code: AifvCode,
    message: Sequence[str],
    mode: int = MODE_LENGTH,
    eof_symbol: Optional[str] = None,
) -> bytes:
    if mode not in (MODE_LENGTH, MODE_EOF):
        raise ValueError(f"unknown framing mode {mode}")
    message = list(message)
    extra = {}
    if mode == MODE_EOF:
        if eof_symbol is None:
            raise ValueError("EOF framing needs an eof_symbol")
        _check_eof_symbol(code, eof_symbol)
        if eof_symbol in message:
            raise UnknownSymbol("message must not contain the EOF symbol itself")
        extra["eof_symbol"] = eof_symbol
        stream, _ = encode(code, message + [eof_symbol])
    else:
        stream, _ = encode(code, message)

    code_bytes = serialize_code(code, extra).encode("utf-8")
    payload, count = pack_symbols(stream.symbols, code.arity)

    out = bytearray()
    out += MAGIC
    out.append(VERSION)
    out.append(code.arity)
    out.append(_FAMILY_TAGS[code.family.kind])
    out.append(mode)
    out += len(code_bytes).to_bytes(4, "little")
    out += code_bytes
    if mode == MODE_LENGTH:
        delta_bits = elias_delta_encode(len(message) + 1)
        delta_bytes = _bits_to_bytes([int(b) for b in delta_bits])
        out.append(len(delta_bytes))
        out += delta_bytes
    out += count.to_bytes(4, "little")
    out += payload
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedStream(
                f"container ends at byte {len(self.data)}, needed {self.pos + n}"
            )
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u8(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "little")


def parse_container(data: bytes) -> ParsedContainer:
    reader = _Reader(data)
    if reader.take(4) != MAGIC:
        raise BadMagic("not an AIFV container")
    version = reader.u8()
    if version != VERSION:
        raise VersionMismatch(f"container version {version}, expected {VERSION}")
    arity = reader.u8()
    reader.u8()  # family tag; authoritative family comes from the code JSON
    mode = reader.u8()
    if mode not in (MODE_LENGTH, MODE_EOF):
        raise VersionMismatch(f"unknown framing mode {mode}")

    code_obj = json.loads(reader.take(reader.u32()).decode("utf-8"))
    eof_symbol = code_obj.get("eof_symbol")
    code = deserialize_code(json.dumps(code_obj))
    if code.arity != arity:
        raise VersionMismatch("header arity disagrees with the embedded code")

    msg_len = None
    if mode == MODE_LENGTH:
        delta_bytes = reader.take(reader.u8())
        bits = "".join(str(b) for b in _bytes_to_bits(delta_bytes, len(delta_bytes) * 8))
        msg_len, _ = _read_delta(bits, 0)
        msg_len -= 1

    count = reader.u32()
    needed = (count + 7) // 8 if arity == 2 else count
    payload = reader.take(needed)
    stream = SymbolStream(unpack_symbols(payload, arity, count), arity)

    decoder = Decoder(code)
    if mode == MODE_LENGTH:
        message = decoder.decode(stream, msg_len)
    else:
        if eof_symbol is None:
            raise VersionMismatch("EOF-framed container without an eof_symbol")
        message = decoder.decode_until(stream, eof_symbol)
    return ParsedContainer(code, mode, eof_symbol, message)


def read_container(data: bytes) -> list[str]:
    """Inverse of write_container: the original message, bit-exactly."""
    return parse_container(data).message
