"""Bump allocator over one contiguous byte store.

Handles are plain ``int`` byte offsets, so handle order is creation order and
growing the store never changes a handle.  ``NIL`` (-1) sorts below every
real handle.
"""
import zlib
from collections import Counter

import numpy as np

from ._kernels import ALIGN, NIL, align

__all__ = ["Arena", "ArenaFull", "NIL"]


class ArenaFull(MemoryError):
    """The store cannot grow to satisfy an allocation."""


class Arena:
    """Stack-shaped storage: ``create`` bumps ``freeloc``, ``truncate`` pops.

    :param capacity: initial size of the store in bytes.
    :param max_capacity: hard limit; allocations beyond it raise
        :class:`ArenaFull`.  ``None`` means unbounded.
    :param trace: keep an ``(offset, size, kind)`` log of every allocation.
    """

    def __init__(self, capacity=1 << 16, max_capacity=None, trace=False):
        capacity = max(ALIGN, align(capacity))
        if max_capacity is not None:
            capacity = min(capacity, align(max_capacity))
        self.max_capacity = max_capacity
        self.freeloc = 0
        self.n_allocs = 0
        self.allocs_by_kind = Counter()
        self.trace = [] if trace else None
        self._set_store(np.zeros(capacity, dtype=np.uint8))

    def _set_store(self, buf):
        self.data = buf
        self.words = buf.view(np.int64)
        # read-only aliases handed to code that must not mutate
        self.data_ro = buf.view()
        self.data_ro.flags.writeable = False
        self.words_ro = self.words.view()
        self.words_ro.flags.writeable = False

    @property
    def capacity(self):
        return self.data.shape[0]

    def reserve(self, nbytes):
        """Make room for ``nbytes`` more bytes above ``freeloc``."""
        need = self.freeloc + nbytes
        if need <= self.capacity:
            return
        if self.max_capacity is not None and need > self.max_capacity:
            raise ArenaFull(f"need {need} bytes, limit is {self.max_capacity}")
        new = self.capacity
        while new < need:
            new *= 2
        if self.max_capacity is not None:
            new = min(new, align(self.max_capacity))
        buf = np.zeros(new, dtype=np.uint8)
        buf[:self.freeloc] = self.data[:self.freeloc]
        self._set_store(buf)

    def note(self, offset, size, kind):
        """Account for an allocation made directly by a kernel."""
        self.n_allocs += 1
        self.allocs_by_kind[kind] += 1
        if self.trace is not None:
            self.trace.append((offset, size, kind))

    def create(self, size, kind="raw"):
        if size < 0:
            raise ValueError("negative allocation size")
        size = align(size)
        self.reserve(size)
        h = self.freeloc
        self.freeloc += size
        self.note(h, size, kind)
        return h

    def copy_in(self, value, kind="raw"):
        """Allocate and write ``value``.

        ``value`` is anything bytes-like, or an object with ``to_record()``
        returning bytes (a :class:`~lifolex.bitstr.BitString`, for one).
        """
        if hasattr(value, "to_record"):
            value = value.to_record()
        raw = np.frombuffer(memoryview(value).cast("B"), dtype=np.uint8)
        h = self.create(raw.shape[0], kind)
        self.data[h:h + raw.shape[0]] = raw
        return h

    def read(self, h, size):
        if h < 0 or h + size > self.freeloc:
            raise IndexError(f"handle {h} (+{size}) outside live region")
        return self.data[h:h + size].tobytes()

    def mark(self):
        return self.freeloc

    def truncate(self, m):
        """Pop everything at or above offset ``m``."""
        if not 0 <= m <= self.freeloc:
            raise ValueError(f"truncate to {m} outside 0..{self.freeloc}")
        self.freeloc = m

    def checksum(self, lo=0, hi=None):
        """Adler-32 of the bytes in ``[lo, hi)``; ``hi`` defaults to freeloc."""
        hi = self.freeloc if hi is None else hi
        return zlib.adler32(self.data[lo:hi])

    def dump_trace(self):
        if self.trace is None:
            return ""
        return "\n".join(f"{off}: {size}: {kind}" for off, size, kind in self.trace)

    def __repr__(self):
        return f"Arena(freeloc={self.freeloc}, capacity={self.capacity})"
