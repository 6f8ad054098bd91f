"""Canonical byte encoding.

Integers are little-endian and fixed width; variable-length values carry a
u32 length prefix. Everything that gets hashed or MAC'd goes through here so
two encodings of the same value are always bit-identical.
"""

from __future__ import annotations

import struct

from .errors import EncodingError


class Writer:
    def __init__(self) -> None:
        self._parts: list[bytes] = []

    def u8(self, v: int) -> "Writer":
        self._parts.append(struct.pack("<B", v))
        return self

    def u32(self, v: int) -> "Writer":
        self._parts.append(struct.pack("<I", v))
        return self

    def u64(self, v: int) -> "Writer":
        if v < 0 or v >= 1 << 64:
            raise EncodingError(f"u64 out of range: {v}")
        self._parts.append(struct.pack("<Q", v))
        return self

    def uint(self, v: int, width: int) -> "Writer":
        try:
            self._parts.append(int(v).to_bytes(width, "little"))
        except OverflowError as exc:
            raise EncodingError(f"integer does not fit in {width} bytes") from exc
        return self

    def fixed(self, b: bytes, width: int) -> "Writer":
        if len(b) != width:
            raise EncodingError(f"expected {width} bytes, got {len(b)}")
        self._parts.append(bytes(b))
        return self

    def var(self, b: bytes) -> "Writer":
        self.u32(len(b))
        self._parts.append(bytes(b))
        return self

    def text(self, s: str) -> "Writer":
        return self.var(s.encode("utf-8"))

    def raw(self, b: bytes) -> "Writer":
        self._parts.append(bytes(b))
        return self

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, data: bytes) -> None:
        self._data = memoryview(bytes(data))
        self._pos = 0

    def _take(self, n: int) -> bytes:
        if n < 0 or self._pos + n > len(self._data):
            raise EncodingError("truncated input")
        out = self._data[self._pos:self._pos + n].tobytes()
        self._pos += n
        return out

    def u8(self) -> int:
        return self._take(1)[0]

    def u32(self) -> int:
        return struct.unpack("<I", self._take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self._take(8))[0]

    def uint(self, width: int) -> int:
        return int.from_bytes(self._take(width), "little")

    def fixed(self, width: int) -> bytes:
        return self._take(width)

    def var(self) -> bytes:
        return self._take(self.u32())

    def text(self) -> str:
        try:
            return self.var().decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingError("invalid utf-8") from exc

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos

    def done(self) -> None:
        if self.remaining:
            raise EncodingError(f"{self.remaining} trailing bytes")
