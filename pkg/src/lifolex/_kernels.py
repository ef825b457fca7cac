"""Hot loops over the arena: bit comparison, trie search, copy-on-write insert.

All kernels take the arena as two views of one buffer: ``words`` (int64) for
node and frame records, ``data`` (uint8) for packed key bits.  Handles are
byte offsets; a record's first word is ``words[h >> 3]``.

Bits are packed most-significant-bit first.  A bit string in the arena is a
length word followed by its packed bytes.
"""
import numpy as np

from ._accel import HAS_NUMBA, jit

NIL = -1
TOMBSTONE = -2
ALIGN = 8

# node record, in words
RKEY = 0
DIST = 1
BRANCH = 2
LINK = 3
VAL = 4
NODE_WORDS = 5
NODE_SIZE = NODE_WORDS * 8

# frame record, in words
GATE = 0
FREELOC = 1
POP = 2
VLEN = 3
FRAME_WORDS = 4
FRAME_SIZE = FRAME_WORDS * 8

# slots of the int64 stats vector shared by the kernels
ST_FOUND = 0
ST_FINDPOS = 1
ST_INSERTPOS = 2
ST_D = 3
ST_QOFF = 4
ST_QLEN = 5
ST_OUTER = 6
ST_LINKS = 7
ST_VISITED = 8
ST_NDSEQ = 9
ST_SPLICE = 10
ST_COPIES = 11
ST_FREELOC = 12
ST_WRITES = 13
ST_MINWRITE = 14
ST_STATUS = 15
ST_NLOG = 16
N_STATS = 17

# where a new node gets attached
SPLICE_GATE = 0
SPLICE_BRANCH = 1
SPLICE_LINK = 2

# how cow_insert_kernel picks the field to splice into
RULE_TRACKED = 0  # remember whether the last move was a branch or a link
RULE_FLIPPED = 1  # deliberately wrong, for harness self-tests
RULE_LITERAL = 2  # "insertpos.branch == findpos", ambiguous when both are nil

STATUS_OK = 0
STATUS_NO_SPACE = 1

# allocation kinds for the trace log
KIND_NODE = 0
KIND_BITS = 1
KIND_FRAME = 2
KIND_COPY = 3
KIND_NAMES = ("node", "bits", "frame", "copy")

_NO_WRITE = np.iinfo(np.int64).max


@jit
def align(n):
    return (n + ALIGN - 1) & ~(ALIGN - 1)


@jit
def bits_size(nbits):
    """Arena bytes taken by a stored bit string of ``nbits`` bits."""
    return align(8 + ((nbits + 7) >> 3))


@jit
def _bit(buf, pos):
    return (buf[pos >> 3] >> (7 - (pos & 7))) & 1


@jit
def _first_diff_loop(a, ao, b, bo, n):
    for i in range(n):
        if _bit(a, ao + i) != _bit(b, bo + i):
            return i
    return n


def _unpack_range(buf, off, n):
    return np.unpackbits(buf[off >> 3:(off + n + 7) >> 3])[off & 7:(off & 7) + n]


def _first_diff_np(a, ao, b, bo, n):
    if n == 0:
        return 0
    ne = _unpack_range(a, ao, n) != _unpack_range(b, bo, n)
    i = int(ne.argmax())
    return i if ne[i] else n


@jit
def _pack_bits_loop(src, so, n, dst, dbyte):
    for j in range((n + 7) >> 3):
        dst[dbyte + j] = 0
    for i in range(n):
        if _bit(src, so + i):
            dst[dbyte + (i >> 3)] |= 1 << (7 - (i & 7))


def _pack_bits_np(src, so, n, dst, dbyte):
    if n == 0:
        return
    packed = np.packbits(_unpack_range(src, so, n))
    dst[dbyte:dbyte + packed.shape[0]] = packed


if HAS_NUMBA:
    first_diff = _first_diff_loop
    pack_bits = _pack_bits_loop
else:
    first_diff = _first_diff_np
    pack_bits = _pack_bits_np


@jit
def diverge(qd, qo, qn, words, data, rk):
    """-1 if the residual query equals the stored string at ``rk``, else d."""
    kn = words[rk >> 3]
    m = qn if qn < kn else kn
    i = first_diff(qd, qo, data, (rk + 8) * 8, m)
    if i < m:
        return i
    if qn == kn:
        return -1
    return m


@jit
def search_kernel(words, data, gate, qd, qo, qn, stats, dseq):
    for k in range(stats.shape[0]):
        stats[k] = 0
    findpos = gate
    insertpos = NIL
    d = 0
    found = 0
    splice = SPLICE_GATE
    outer = 0
    links = 0
    visited = 0
    nd = 0
    while findpos != NIL:
        outer += 1
        dd = diverge(qd, qo, qn, words, data, words[(findpos >> 3) + RKEY])
        if dd < 0:
            found = 1
            break
        d = dd
        if nd < dseq.shape[0]:
            dseq[nd] = d
        nd += 1
        insertpos = findpos
        findpos = words[(insertpos >> 3) + BRANCH]
        splice = SPLICE_BRANCH
        if findpos != NIL:
            visited += 1
        while findpos != NIL and d > words[(findpos >> 3) + DIST]:
            insertpos = findpos
            findpos = words[(findpos >> 3) + LINK]
            splice = SPLICE_LINK
            links += 1
            if findpos != NIL:
                visited += 1
        if findpos == NIL or d != words[(findpos >> 3) + DIST]:
            break
        qo += d
        qn -= d
    stats[ST_FOUND] = found
    stats[ST_FINDPOS] = findpos
    stats[ST_INSERTPOS] = insertpos
    stats[ST_D] = 0 if found else d
    stats[ST_QOFF] = qo
    stats[ST_QLEN] = qn
    stats[ST_OUTER] = outer
    stats[ST_LINKS] = links
    stats[ST_VISITED] = visited
    stats[ST_NDSEQ] = nd
    stats[ST_SPLICE] = splice


@jit
def _wr(words, stats, w, value):
    words[w] = value
    stats[ST_WRITES] += 1
    if w * 8 < stats[ST_MINWRITE]:
        stats[ST_MINWRITE] = w * 8


@jit
def _alloc(stats, alog, size, kind, cap):
    at = stats[ST_FREELOC]
    if at + size > cap:
        return NIL
    stats[ST_FREELOC] = at + size
    n = stats[ST_NLOG]
    if n < alog.shape[0]:
        alog[n, 0] = at
        alog[n, 1] = size
        alog[n, 2] = kind
    stats[ST_NLOG] = n + 1
    return at


@jit
def _copy_node(words, stats, alog, src, cap):
    dst = _alloc(stats, alog, NODE_SIZE, KIND_COPY, cap)
    if dst == NIL:
        return NIL
    for k in range(NODE_WORDS):
        _wr(words, stats, (dst >> 3) + k, words[(src >> 3) + k])
    stats[ST_COPIES] += 1
    return dst


@jit
def cow_insert_kernel(words, data, top, qd, qo, qn, val, stats, dseq, alog, rule):
    """Insert with copy-on-write of every traversed node older than ``top``.

    ``stats[ST_FREELOC]`` carries the arena top in and out.  On
    ``STATUS_NO_SPACE`` every copy already made is spliced in and the caller
    may grow the arena and call again.
    """
    fl = stats[ST_FREELOC]
    for k in range(stats.shape[0]):
        stats[k] = 0
    stats[ST_FREELOC] = fl
    stats[ST_MINWRITE] = _NO_WRITE
    cap = data.shape[0]
    ftop = top >> 3

    findpos = words[ftop + GATE]
    if findpos != NIL and findpos < top:
        # open_environment copies the gate, so this only guards a stale frame
        newpos = _copy_node(words, stats, alog, findpos, cap)
        if newpos == NIL:
            stats[ST_STATUS] = STATUS_NO_SPACE
            return
        _wr(words, stats, ftop + GATE, newpos)
        findpos = newpos

    insertpos = NIL
    d = 0
    found = 0
    splice = SPLICE_GATE
    outer = 0
    links = 0
    visited = 0
    nd = 0
    while findpos != NIL:
        outer += 1
        dd = diverge(qd, qo, qn, words, data, words[(findpos >> 3) + RKEY])
        if dd < 0:
            found = 1
            break
        d = dd
        if nd < dseq.shape[0]:
            dseq[nd] = d
        nd += 1
        insertpos = findpos
        findpos = words[(insertpos >> 3) + BRANCH]
        splice = SPLICE_BRANCH
        if findpos != NIL:
            visited += 1
            if findpos < top:
                newpos = _copy_node(words, stats, alog, findpos, cap)
                if newpos == NIL:
                    stats[ST_STATUS] = STATUS_NO_SPACE
                    return
                _wr(words, stats, (insertpos >> 3) + BRANCH, newpos)
                findpos = newpos
        while findpos != NIL and d > words[(findpos >> 3) + DIST]:
            insertpos = findpos
            findpos = words[(findpos >> 3) + LINK]
            splice = SPLICE_LINK
            links += 1
            if findpos != NIL:
                visited += 1
                if findpos < top:
                    newpos = _copy_node(words, stats, alog, findpos, cap)
                    if newpos == NIL:
                        stats[ST_STATUS] = STATUS_NO_SPACE
                        return
                    _wr(words, stats, (insertpos >> 3) + LINK, newpos)
                    findpos = newpos
        if findpos == NIL or d != words[(findpos >> 3) + DIST]:
            break
        qo += d
        qn -= d

    if found:
        _wr(words, stats, (findpos >> 3) + VAL, val)
    else:
        rn = qn - d
        if stats[ST_FREELOC] + NODE_SIZE + bits_size(rn) > cap:
            stats[ST_STATUS] = STATUS_NO_SPACE
            return
        newpos = _alloc(stats, alog, NODE_SIZE, KIND_NODE, cap)
        nw = newpos >> 3
        _wr(words, stats, nw + DIST, d)
        if rule == RULE_FLIPPED:
            splice = SPLICE_LINK if splice == SPLICE_BRANCH else SPLICE_BRANCH
        elif rule == RULE_LITERAL and insertpos != NIL:
            if words[(insertpos >> 3) + BRANCH] == findpos:
                splice = SPLICE_BRANCH
            else:
                splice = SPLICE_LINK
        if insertpos == NIL:
            _wr(words, stats, ftop + GATE, newpos)
        elif splice == SPLICE_BRANCH:
            _wr(words, stats, (insertpos >> 3) + BRANCH, newpos)
        else:
            _wr(words, stats, (insertpos >> 3) + LINK, newpos)
        _wr(words, stats, nw + BRANCH, NIL)
        _wr(words, stats, nw + LINK, findpos)
        rk = _alloc(stats, alog, bits_size(rn), KIND_BITS, cap)
        _wr(words, stats, rk >> 3, rn)
        pack_bits(qd, qo + d, rn, data, rk + 8)
        _wr(words, stats, nw + RKEY, rk)
        _wr(words, stats, nw + VAL, val)

    stats[ST_FOUND] = found
    stats[ST_FINDPOS] = findpos
    stats[ST_INSERTPOS] = insertpos
    stats[ST_D] = 0 if found else d
    stats[ST_QOFF] = qo
    stats[ST_QLEN] = qn
    stats[ST_OUTER] = outer
    stats[ST_LINKS] = links
    stats[ST_VISITED] = visited
    stats[ST_NDSEQ] = nd
    stats[ST_SPLICE] = splice
    stats[ST_STATUS] = STATUS_OK
