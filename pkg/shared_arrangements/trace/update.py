"""Update triples, canonical key encoding and checked diff arithmetic"""

import struct
from typing import Any, NamedTuple

from shared_arrangements.errors import DiffOverflowError
from shared_arrangements.lattice.time import Time

__all__ = ["Update", "checked_add", "checked_mul", "encode", "fnv1a", "route"]

I64_MIN = -(1 << 63)
I64_MAX = (1 << 63) - 1

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
U64_MASK = (1 << 64) - 1


class Update(NamedTuple):
    key: Any
    val: Any
    time: Time
    diff: int


def checked_add(a: int, b: int) -> int:
    total = a + b
    if total < I64_MIN or total > I64_MAX:
        raise DiffOverflowError(f"{a} + {b} overflows a signed 64-bit diff")
    return total


def checked_mul(a: int, b: int) -> int:
    total = a * b
    if total < I64_MIN or total > I64_MAX:
        raise DiffOverflowError(f"{a} * {b} overflows a signed 64-bit diff")
    return total


def encode(value: Any) -> bytes:
    """Canonical byte encoding used for routing

    Unsigned 64-bit integers are eight big-endian bytes; composite values
    concatenate the encodings of their fields, each length-prefixed.
    """
    if isinstance(value, bool):
        return b"\x01" if value else b"\x00"
    if isinstance(value, int):
        if 0 <= value <= U64_MASK:
            return value.to_bytes(8, "big")
        return b"-" + value.to_bytes(16, "big", signed=True)
    if isinstance(value, str):
        return value.encode("utf-8")
    if isinstance(value, bytes):
        return value
    if isinstance(value, float):
        return struct.pack(">d", value)
    if value is None:
        return b""
    if isinstance(value, tuple):
        parts = [encode(v) for v in value]
        return b"".join(len(p).to_bytes(4, "big") + p for p in parts)
    raise TypeError(f"no canonical encoding for {type(value).__name__}")


def fnv1a(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & U64_MASK
    return h


def route(key: Any, workers: int) -> int:
    """The worker owning ``key``"""
    if workers == 1:
        return 0
    return fnv1a(encode(key)) % workers
