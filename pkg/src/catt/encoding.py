"""Big-endian primitives for the canonical wire formats.

Multi-byte integers are big-endian; variable-length fields carry an 8-byte
big-endian length prefix; large integers are zero-padded to a fixed width so
logically equal values always serialize to identical bytes.
"""

from __future__ import annotations

from .errors import Malformed

U64 = 8


def be64(value: int) -> bytes:
    return value.to_bytes(U64, "big")


def be32(value: int) -> bytes:
    return value.to_bytes(4, "big")


def lp(data: bytes) -> bytes:
    """Length-prefix a byte string with its 8-byte big-endian length."""
    return be64(len(data)) + data


def int_to_fixed(value: int, width: int) -> bytes:
    if value < 0:
        raise ValueError("negative integers have no canonical encoding")
    return value.to_bytes(width, "big")


def int_from_bytes(data: bytes) -> int:
    return int.from_bytes(data, "big")


class Reader:
    """Cursor over a byte string that raises Malformed on any short read."""

    def __init__(self, data: bytes, what: str = "input"):
        self._data = data
        self._pos = 0
        self._what = what

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos

    def take(self, count: int) -> bytes:
        if count < 0 or self.remaining < count:
            raise Malformed(f"truncated {self._what}")
        chunk = self._data[self._pos : self._pos + count]
        self._pos += count
        return chunk

    def byte(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def u64(self) -> int:
        return int.from_bytes(self.take(U64), "big")

    def lp(self) -> bytes:
        return self.take(self.u64())

    def expect_end(self) -> None:
        if self.remaining:
            raise Malformed(f"trailing bytes after {self._what}")
