"""Little-endian primitives shared by the index file formats."""

from __future__ import annotations

import struct

_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")


class FormatError(ValueError):
    pass


class Writer:
    def __init__(self) -> None:
        self._parts: list[bytes] = []

    def raw(self, b: bytes) -> None:
        self._parts.append(b)

    def u16(self, v: int) -> None:
        self._parts.append(_U16.pack(v))

    def u32(self, v: int) -> None:
        self._parts.append(_U32.pack(v))

    def str(self, s: str) -> None:
        b = s.encode("utf-8")
        self._parts.append(_U32.pack(len(b)))
        self._parts.append(b)

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def _take(self, n: int) -> bytes:
        end = self.pos + n
        if end > len(self.data):
            raise FormatError("truncated file")
        b = self.data[self.pos:end]
        self.pos = end
        return b

    def raw(self, n: int) -> bytes:
        return self._take(n)

    def u16(self) -> int:
        return _U16.unpack(self._take(2))[0]

    def u32(self) -> int:
        return _U32.unpack(self._take(4))[0]

    def str(self) -> str:
        return self._take(self.u32()).decode("utf-8")

    def expect_end(self) -> None:
        if self.pos != len(self.data):
            raise FormatError("trailing bytes after end of data")


def check_header(r: Reader, magic: bytes, version: int) -> None:
    if r.raw(len(magic)) != magic:
        raise FormatError(f"bad magic, expected {magic!r}")
    v = r.u16()
    if v != version:
        raise FormatError(f"unsupported format version {v}")
