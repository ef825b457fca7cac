"""Immutable bit strings, key encoding and the divergence of two strings."""
import enum
from typing import NamedTuple, Optional, Union

import numpy as np

from . import _kernels as K

_EMPTY = np.zeros(0, dtype=np.uint8)
_EMPTY.flags.writeable = False


class BitString:
    """A finite sequence of bits, packed MSB-first.

    Instances may share a packed buffer with an offset, which makes
    :func:`suffix` O(1).  The buffer is read-only.
    """

    __slots__ = ("_data", "_off", "_len", "_hash")

    def __init__(self, data, off=0, length=None):
        data = np.asarray(data, dtype=np.uint8)
        if data.flags.writeable:
            data = data.copy()
            data.flags.writeable = False
        if length is None:
            length = data.shape[0] * 8 - off
        if off < 0 or length < 0 or off + length > data.shape[0] * 8:
            raise ValueError("bit range outside buffer")
        self._data = data
        self._off = off
        self._len = length
        self._hash = None

    @classmethod
    def _view(cls, data, off, length):
        # trusted constructor: read-only buffer, range already checked
        self = object.__new__(cls)
        self._data = data
        self._off = off
        self._len = length
        self._hash = None
        return self

    @classmethod
    def from_bits(cls, bits) -> "BitString":
        """Build from an iterable of 0/1 values or a string of '0'/'1'."""
        if isinstance(bits, str):
            if bits in ('""', ""):
                return EMPTY
            if set(bits) - {"0", "1"}:
                raise ValueError(f"not a bit literal: {bits!r}")
            arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
        else:
            arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits,
                             dtype=np.uint8)
            if arr.size and arr.max() > 1:
                raise ValueError("bits must be 0 or 1")
        return cls(np.packbits(arr), 0, int(arr.shape[0]))

    @property
    def packed(self):
        """``(buffer, bit_offset, bit_length)`` for the kernels."""
        return self._data, self._off, self._len

    def bits(self) -> np.ndarray:
        """The bits as a uint8 array of 0/1."""
        if self._len == 0:
            return np.zeros(0, dtype=np.uint8)
        return K._unpack_range(self._data, self._off, self._len)

    def to_bytes(self) -> bytes:
        """Packed bytes starting at bit 0, zero padded."""
        return np.packbits(self.bits()).tobytes()

    def to_record(self) -> bytes:
        """Arena layout: little-endian length word then packed bits, aligned."""
        body = np.int64(self._len).tobytes() + self.to_bytes()
        return body + bytes(K.bits_size(self._len) - len(body))

    def __len__(self):
        return self._len

    def __getitem__(self, i):
        if isinstance(i, slice):
            return BitString.from_bits(self.bits()[i])
        if i < 0:
            i += self._len
        if not 0 <= i < self._len:
            raise IndexError("bit index out of range")
        p = self._off + i
        return int(self._data[p >> 3] >> (7 - (p & 7))) & 1

    def __eq__(self, other):
        if not isinstance(other, BitString):
            return NotImplemented
        if self._len != other._len:
            return False
        return K.first_diff(self._data, self._off, other._data, other._off,
                            self._len) == self._len

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._len, self.to_bytes()))
        return self._hash

    def __str__(self):
        if self._len == 0:
            return '""'
        return (self.bits() + ord("0")).tobytes().decode("ascii")

    def __repr__(self):
        return f"BitString({str(self)!r})"

    def __add__(self, other):
        if not isinstance(other, BitString):
            return NotImplemented
        return BitString.from_bits(np.concatenate([self.bits(), other.bits()]))


EMPTY = BitString(_EMPTY, 0, 0)


class DivKind(enum.Enum):
    EQUAL = "equal"
    PREFIX = "prefix"
    MISMATCH = "mismatch"


class Divergence(NamedTuple):
    kind: DivKind
    d: Optional[int] = None


def encode_key(raw: Union[bytes, bytearray, str]) -> BitString:
    """Expand each byte to 8 bits, most significant first.  Text is UTF-8."""
    if isinstance(raw, str):
        raw = raw.encode("utf-8")
    arr = np.frombuffer(bytes(raw), dtype=np.uint8)
    return BitString(arr, 0, arr.shape[0] * 8)


def decode_key(x: BitString) -> bytes:
    if len(x) % 8:
        raise ValueError("bit length is not a whole number of bytes")
    return x.to_bytes()


def divergence(x: BitString, y: BitString) -> Divergence:
    """First index where ``x`` and ``y`` differ.

    When one is a proper prefix of the other, d is the shorter length.
    """
    xd, xo, xn = x.packed
    yd, yo, yn = y.packed
    m = min(xn, yn)
    i = K.first_diff(xd, xo, yd, yo, m)
    if i < m:
        return Divergence(DivKind.MISMATCH, int(i))
    if xn == yn:
        return Divergence(DivKind.EQUAL)
    return Divergence(DivKind.PREFIX, m)


def suffix(x: BitString, d: int) -> BitString:
    """``x`` with its first ``d`` bits dropped."""
    if not 0 <= d <= len(x):
        raise ValueError(f"suffix offset {d} outside 0..{len(x)}")
    if d == len(x):
        return EMPTY
    return BitString._view(x._data, x._off + d, x._len - d)
