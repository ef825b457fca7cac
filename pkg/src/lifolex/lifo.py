"""Scoped dictionary: nested environments over one arena, LIFO reclaimed.

Each environment is a frame record ``(gate, freeloc, pop, vlen)`` living in
the arena.  Opening one allocates a frame and a copy of the current gate
node; inserts copy every traversed node older than the frame before writing
to it.  Closing re-points ``top`` at ``pop`` and truncates the arena, which
discards every node and key suffix the environment created.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

from . import _kernels as K
from .arena import NIL, Arena, ArenaFull
from .lexikon import (
    SearchOutcome,
    as_key,
    check_chains,
    dump_trie,
    iter_entries,
    scratch,
    search_from,
)

_ABSENT = object()


class EnvironmentUnderflow(RuntimeError):
    """close_environment on the base frame."""


@dataclass(frozen=True)
class InsertReport:
    """Instrumentation for one insert: traversal counters plus the node
    copies and field writes it made."""

    overwrote: bool
    outer_iters: int
    link_steps: int
    d_seq: Tuple[int, ...]
    nodes_visited: int
    compares: int
    copies: int
    writes: int
    min_write: Optional[int]
    retries: int


class LifoLexikon:
    """Dictionary with ``open_environment``/``close_environment``.

    >>> lx = LifoLexikon()
    >>> lx.insert("x", 1)
    >>> lx.open_environment()
    >>> lx.insert("x", 2)
    >>> lx.lookup("x")
    2
    >>> lx.close_environment()
    >>> lx.lookup("x")
    1
    """

    def __init__(self, arena: Optional[Arena] = None, *, capacity=1 << 16, trace=False,
                 splice_rule=K.RULE_TRACKED):
        self.arena = arena if arena is not None else Arena(capacity, trace=trace)
        self.splice_rule = splice_rule
        self._values = []
        # frame-locality witness: writes below the current frame
        self.write_violations = 0
        self.last_insert: Optional[InsertReport] = None
        self.last_open_allocs = 0
        self.last_open_copies = 0
        self.last_close_steps = 0
        top = self.arena.create(K.FRAME_SIZE, "frame")
        self.top = top
        self._set(top, K.GATE, NIL)
        self._set(top, K.POP, NIL)
        self._set(top, K.VLEN, 0)
        self._set(top, K.FREELOC, self.arena.freeloc)

    def _set(self, h, field, value):
        if h < self.top:
            self.write_violations += 1
        self.arena.words[(h >> 3) + field] = value

    def _get(self, h, field):
        return int(self.arena.words[(h >> 3) + field])

    @property
    def gate(self):
        return self._get(self.top, K.GATE)

    def depth(self):
        n = 0
        f = self.top
        while f != NIL:
            n += 1
            f = self._get(f, K.POP)
        return n

    def open_environment(self):
        arena = self.arena
        before = arena.n_allocs
        old = self.top
        old_gate = self._get(old, K.GATE)
        arena.reserve(K.FRAME_SIZE + K.NODE_SIZE)
        frame = arena.create(K.FRAME_SIZE, "frame")
        self.top = frame
        copies = 0
        gate = NIL
        if old_gate != NIL:
            gate = arena.create(K.NODE_SIZE, "copy")
            w = old_gate >> 3
            for k in range(K.NODE_WORDS):
                self._set(gate, k, int(arena.words[w + k]))
            copies = 1
        self._set(frame, K.GATE, gate)
        self._set(frame, K.POP, old)
        self._set(frame, K.VLEN, len(self._values))
        self._set(frame, K.FREELOC, arena.freeloc)
        self.last_open_allocs = arena.n_allocs - before
        self.last_open_copies = copies

    def close_environment(self):
        steps = 1
        below = self._get(self.top, K.POP)
        if below == NIL:
            raise EnvironmentUnderflow("cannot close the base environment")
        self.top = below
        steps += 1
        self.arena.truncate(self._get(below, K.FREELOC))
        steps += 1
        del self._values[self._get(below, K.VLEN):]
        steps += 1
        self.last_close_steps = steps

    def search(self, key) -> SearchOutcome:
        return search_from(self.arena, self.gate, as_key(key))

    def lookup(self, key, default=None):
        return self.find(key, default)[0]

    def find(self, key, default=None):
        """``(value or default, SearchOutcome)``."""
        out = search_from(self.arena, self.gate, as_key(key))
        if not out.found:
            return default, out
        idx = self._get(out.findpos, K.VAL)
        return (default if idx == K.TOMBSTONE else self._values[idx]), out

    def __contains__(self, key):
        return self.lookup(key, _ABSENT) is not _ABSENT

    def insert(self, key, value):
        self._values.append(value)
        try:
            self._insert(as_key(key), len(self._values) - 1)
        except ArenaFull:
            # the kernel never stores a value index before it has room
            self._values.pop()
            raise

    def remove(self, key):
        """Bind ``key`` to a tombstone; lookups then report it absent."""
        self._insert(as_key(key), K.TOMBSTONE)

    def _insert(self, x, val):
        arena = self.arena
        qd, qo, qn = x.packed
        st, dseq, alog = scratch(qn)
        copies = writes = retries = 0
        min_write = None
        need = K.NODE_SIZE + K.bits_size(qn)
        arena.reserve(need)
        while True:
            st[K.ST_FREELOC] = arena.freeloc
            K.cow_insert_kernel(arena.words, arena.data, self.top, qd, qo, qn, val,
                                st, dseq, alog, self.splice_rule)
            nlog = int(st[K.ST_NLOG])
            if nlog > alog.shape[0]:
                raise AssertionError("allocation log overflow")
            for off, size, kind in alog[:nlog].tolist():
                arena.note(off, size, K.KIND_NAMES[kind])
            arena.freeloc = int(st[K.ST_FREELOC])
            copies += int(st[K.ST_COPIES])
            writes += int(st[K.ST_WRITES])
            if int(st[K.ST_WRITES]):
                mw = int(st[K.ST_MINWRITE])
                min_write = mw if min_write is None else min(min_write, mw)
            if st[K.ST_STATUS] == K.STATUS_OK:
                break
            retries += 1
            self._grow(need)
        if min_write is not None and min_write < self.top:
            self.write_violations += 1
        self._set(self.top, K.FREELOC, arena.freeloc)
        self._set(self.top, K.VLEN, len(self._values))
        nd = int(st[K.ST_NDSEQ])
        self.last_insert = InsertReport(
            overwrote=bool(st[K.ST_FOUND]),
            outer_iters=nd,
            link_steps=int(st[K.ST_LINKS]),
            d_seq=tuple(dseq[:min(nd, dseq.shape[0])].tolist()),
            nodes_visited=int(st[K.ST_VISITED]),
            compares=int(st[K.ST_OUTER]),
            copies=copies,
            writes=writes,
            min_write=min_write,
            retries=retries,
        )

    def _grow(self, need):
        arena = self.arena
        room = arena.capacity - arena.freeloc
        want = max(arena.capacity, need)
        if arena.max_capacity is not None:
            want = min(want, arena.max_capacity - arena.freeloc)
        if want <= room:
            raise ArenaFull(f"no room for path copies, limit is {arena.max_capacity}")
        arena.reserve(want)

    def items(self):
        for _h, _depth, key, val in iter_entries(self.arena, self.gate):
            if val != K.TOMBSTONE:
                yield key, self._values[val]

    def dump(self) -> str:
        return dump_trie(self.arena, self.gate, self._values)

    def check(self) -> int:
        """Structural self-check; returns the number of reachable nodes."""
        return check_chains(self.arena, self.gate)

    def checksum(self, hi=None):
        return self.arena.checksum(0, hi)
