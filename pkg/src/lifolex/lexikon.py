"""Bit-trie dictionary with in-place insert (no environments).

Every node stores the suffix of its key that follows its branch point
(``rkey``), the index in the parent's suffix where it branches off
(``dist``), the first node branching off its own suffix (``branch``) and the
next node branching off the same parent suffix (``link``).  Along a link
chain ``dist`` strictly increases.
"""
import threading
from typing import Iterator, NamedTuple, Optional, Tuple

import numpy as np

from . import _kernels as K
from .arena import NIL, Arena
from .bitstr import EMPTY, BitString, encode_key, suffix

_ABSENT = object()


def as_key(key) -> BitString:
    if isinstance(key, BitString):
        return key
    return encode_key(key)


class SearchStats(NamedTuple):
    """Work done by one traversal.

    ``compares`` counts nodes whose suffix was compared with the query;
    ``outer_iters`` counts those that did not match, i.e. the passes that
    produced a divergence index, which ``d_seq`` lists in order.
    ``link_steps`` counts moves along link chains and ``nodes_visited``
    counts nodes entered through a branch or link field.
    """

    outer_iters: int
    link_steps: int
    d_seq: Tuple[int, ...]
    nodes_visited: int
    compares: int

    @property
    def d_sum(self):
        return sum(self.d_seq)

    @property
    def max_zero_run(self):
        best = run = 0
        for d in self.d_seq:
            run = run + 1 if d == 0 else 0
            best = max(best, run)
        return best


class SearchOutcome(NamedTuple):
    found: bool
    findpos: int
    insertpos: int
    d: int
    remainder: BitString
    stats: SearchStats
    splice: int = K.SPLICE_GATE


class Node(NamedTuple):
    rkey: int
    dist: int
    branch: int
    link: int
    val: int


_scratch = threading.local()


def scratch(nbits):
    """Per-thread ``(stats, dseq, alloc_log)`` buffers sized for a key of
    ``nbits`` bits.  Contents are overwritten by the next kernel call."""
    need = 4 * nbits + 16
    bufs = getattr(_scratch, "bufs", None)
    if bufs is None or bufs[1].shape[0] < need:
        size = max(need, 2 * (bufs[1].shape[0] if bufs else 0), 1024)
        bufs = (np.zeros(K.N_STATS, dtype=np.int64),
                np.empty(size, dtype=np.int64),
                np.empty((size, 3), dtype=np.int64))
        _scratch.bufs = bufs
    return bufs


def search_from(arena: Arena, gate: int, x: BitString) -> SearchOutcome:
    """Run the trie search from ``gate`` against read-only arena views."""
    qd, qo, qn = x.packed
    st, dseq, _ = scratch(qn)
    K.search_kernel(arena.words_ro, arena.data_ro, gate, qd, qo, qn, st, dseq)
    nd = int(st[K.ST_NDSEQ])
    stats = SearchStats(
        outer_iters=nd,
        link_steps=int(st[K.ST_LINKS]),
        d_seq=tuple(dseq[:min(nd, dseq.shape[0])].tolist()),
        nodes_visited=int(st[K.ST_VISITED]),
        compares=int(st[K.ST_OUTER]),
    )
    rem = suffix(x, int(st[K.ST_QOFF]) - qo)
    return SearchOutcome(
        found=bool(st[K.ST_FOUND]),
        findpos=int(st[K.ST_FINDPOS]),
        insertpos=int(st[K.ST_INSERTPOS]),
        d=int(st[K.ST_D]),
        remainder=rem,
        stats=stats,
        splice=int(st[K.ST_SPLICE]),
    )


def read_node(arena: Arena, h: int) -> Node:
    w = h >> 3
    return Node(*(int(v) for v in arena.words[w:w + K.NODE_WORDS]))


def read_bits(arena: Arena, h: int) -> BitString:
    n = int(arena.words[h >> 3])
    nbytes = (n + 7) >> 3
    return BitString(arena.data[h + 8:h + 8 + nbytes].copy(), 0, n)


def iter_entries(arena: Arena, gate: int) -> Iterator[Tuple[int, int, BitString, int]]:
    """Preorder ``(handle, depth, full_key, val)``: a node, its branch
    subtree, then its link siblings."""
    if gate == NIL:
        return
    # (handle, depth, parent's full key, length of parent's key before its rkey)
    stack = [(gate, 0, EMPTY, 0)]
    while stack:
        h, depth, pkey, pbase = stack.pop()
        node = read_node(arena, h)
        base = pkey[:pbase + node.dist] if depth else EMPTY
        key = base + read_bits(arena, node.rkey)
        yield h, depth, key, node.val
        if node.link != NIL:
            stack.append((node.link, depth, pkey, pbase))
        if node.branch != NIL:
            stack.append((node.branch, depth + 1, key, len(base)))


def check_chains(arena: Arena, gate: int) -> int:
    """Walk the whole trie; raise if a link chain is not strictly increasing
    in ``dist`` or a node is reachable twice.  Returns the node count."""
    seen = set()
    stack = [gate] if gate != NIL else []
    while stack:
        h = stack.pop()
        prev = -1
        while h != NIL:
            if h in seen:
                raise AssertionError(f"node {h} reachable twice")
            seen.add(h)
            node = read_node(arena, h)
            if node.dist <= prev:
                raise AssertionError(f"link chain not increasing at node {h}")
            prev = node.dist
            if node.branch != NIL:
                stack.append(node.branch)
            h = node.link
    return len(seen)


def format_value(v):
    return str(v)


def dump_trie(arena: Arena, gate: int, values) -> str:
    if gate == NIL:
        return "(empty)"
    lines = []
    for h, depth, _key, val in iter_entries(arena, gate):
        node = read_node(arena, h)
        shown = "<removed>" if val == K.TOMBSTONE else format_value(values[val])
        lines.append(f"{'  ' * depth}[{node.dist}] {read_bits(arena, node.rkey)} = {shown}")
    return "\n".join(lines)


class Lexikon:
    """Bit-trie dictionary whose insert updates nodes in place.

    Keys are :class:`BitString` values or bytes/str (encoded MSB-first).
    Values are arbitrary Python objects kept in a side pool; nodes hold the
    pool index.
    """

    def __init__(self, arena: Optional[Arena] = None):
        self.arena = arena if arena is not None else Arena()
        self.gate = NIL
        self._values = []

    def search(self, key) -> SearchOutcome:
        return search_from(self.arena, self.gate, as_key(key))

    def insert(self, key, value):
        x = as_key(key)
        out = search_from(self.arena, self.gate, x)
        words = self.arena.words
        if out.found:
            self._values.append(value)
            words[(out.findpos >> 3) + K.VAL] = len(self._values) - 1
            return out
        rkey = suffix(out.remainder, out.d)
        # reserve first so exhaustion leaves the dictionary untouched
        self.arena.reserve(K.NODE_SIZE + K.bits_size(len(rkey)))
        newpos = self.arena.create(K.NODE_SIZE, "node")
        words = self.arena.words
        nw = newpos >> 3
        words[nw + K.DIST] = out.d
        if out.insertpos == NIL:
            self.gate = newpos
        elif out.splice == K.SPLICE_BRANCH:
            words[(out.insertpos >> 3) + K.BRANCH] = newpos
        else:
            words[(out.insertpos >> 3) + K.LINK] = newpos
        words[nw + K.BRANCH] = NIL
        words[nw + K.LINK] = out.findpos
        words[nw + K.RKEY] = self.arena.copy_in(rkey, "bits")
        self._values.append(value)
        words[nw + K.VAL] = len(self._values) - 1
        return out

    def lookup(self, key, default=None):
        out = search_from(self.arena, self.gate, as_key(key))
        if not out.found:
            return default
        idx = int(self.arena.words[(out.findpos >> 3) + K.VAL])
        return default if idx == K.TOMBSTONE else self._values[idx]

    def __contains__(self, key):
        return self.lookup(key, _ABSENT) is not _ABSENT

    def items(self):
        """``(key, value)`` pairs in dump order."""
        for _h, _depth, key, val in iter_entries(self.arena, self.gate):
            if val != K.TOMBSTONE:
                yield key, self._values[val]

    def dump(self) -> str:
        return dump_trie(self.arena, self.gate, self._values)
