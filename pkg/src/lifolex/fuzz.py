"""Randomised lockstep testing of :class:`LifoLexikon` against the oracle.

Every operation is applied to both implementations; lookups must agree and
the traversal counters, write targets, arena checksums and environment
costs must respect their bounds.  The first failure stops the run and the
failing prefix is shrunk by delta debugging.
"""
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import _kernels as K
from .bitstr import EMPTY, BitString
from .lifo import LifoLexikon
from .oracle import OracleDict

# total insert work (compares + link steps + copies) per bit of key, see
# bounds in insert_violations
INSERT_STEP_FACTOR = 6
CLOSE_STEPS = 4

Op = Tuple


def random_bits(rng: random.Random, n: int) -> BitString:
    if n == 0:
        return EMPTY
    nbytes = (n + 7) >> 3
    v = rng.getrandbits(n) << (nbytes * 8 - n)
    return BitString(np.frombuffer(v.to_bytes(nbytes, "big"), dtype=np.uint8), 0, n)


class KeySource:
    """Keys with plenty of shared prefixes.

    Half the draws reuse a known key.  Fresh keys are short (0-16 bits) or
    uniform over the full length range, and now and then a prefix triple
    ``u, u0v, u1w`` is queued, the shape behind consecutive zero distances.
    """

    def __init__(self, rng, min_bits=0, max_bits=512, p_reuse=0.5, p_triple=0.05,
                 pool_size=4096):
        self.rng = rng
        self.min_bits = min_bits
        self.max_bits = max_bits
        self.p_reuse = p_reuse
        self.p_triple = p_triple
        self.pool_size = pool_size
        self.pool: List[BitString] = []
        self.pending: List[BitString] = []

    def _length(self):
        rng = self.rng
        if rng.random() < 0.5:
            return rng.randint(self.min_bits, min(self.max_bits, max(self.min_bits, 16)))
        return rng.randint(self.min_bits, self.max_bits)

    def _remember(self, k):
        if len(self.pool) < self.pool_size:
            self.pool.append(k)
        else:
            self.pool[self.rng.randrange(self.pool_size)] = k

    def draw(self) -> BitString:
        rng = self.rng
        if self.pending:
            k = self.pending.pop()
        elif self.pool and rng.random() < self.p_reuse:
            return rng.choice(self.pool)
        elif rng.random() < self.p_triple and self.max_bits >= 1:
            k = self._triple()
        else:
            k = random_bits(rng, self._length())
        self._remember(k)
        return k

    def _triple(self):
        rng = self.rng
        if self.pool and rng.random() < 0.5:
            base = rng.choice(self.pool)
            u = base[:rng.randint(0, len(base))]
        else:
            u = random_bits(rng, rng.randint(0, min(self.max_bits - 1, 16)))
        room = self.max_bits - len(u) - 1
        if room >= 0:
            for bit in (0, 1):
                tail = random_bits(rng, rng.randint(0, min(room, 24)))
                k = u + BitString.from_bits([bit]) + tail
                if len(k) >= self.min_bits:
                    self.pending.append(k)
        if len(u) < self.min_bits:
            return self.pending.pop() if self.pending else random_bits(rng, self._length())
        return u


def generate_ops(seed, n_ops, max_depth=32, min_bits=0, max_bits=512) -> List[Op]:
    rng = random.Random(seed)
    keys = KeySource(rng, min_bits, max_bits)
    ops = []
    depth = 1
    for _ in range(n_ops):
        r = rng.random()
        if r < 0.10:
            if depth < max_depth:
                ops.append(("open",))
                depth += 1
                continue
            r = 0.5
        elif r < 0.20:
            if depth > 1:
                ops.append(("close",))
                depth -= 1
                continue
            r = 0.5
        if r < 0.55:
            ops.append(("insert", keys.draw(), rng.randrange(1 << 30)))
        elif r < 0.62:
            ops.append(("remove", keys.draw()))
        else:
            ops.append(("search", keys.draw()))
    return ops


def search_violations(stats, s):
    """Names of the traversal bounds ``stats`` breaks for a query of s bits."""
    out = []
    if stats.outer_iters > 2 * (s + 1):
        out.append("outer_bound")
    if sum(stats.d_seq) > s:
        out.append("distance_budget")
    if stats.link_steps > s + stats.outer_iters:
        out.append("chain_steps")
    run = 0
    for d in stats.d_seq:
        run = run + 1 if d == 0 else 0
        if run > 2:
            out.append("zero_run")
            break
    return out


def insert_violations(rep, s):
    out = search_violations(rep, s)
    if not rep.copies <= rep.nodes_visited <= rep.link_steps + rep.outer_iters:
        out.append("insert_copies")
    if rep.compares + rep.link_steps + rep.copies > INSERT_STEP_FACTOR * (s + 1):
        out.append("insert_steps")
    return out


@dataclass
class Failure:
    index: int
    kind: str
    detail: str


def _max(a, b):
    return b if a is None else max(a, b)


def _na(v):
    return "n/a" if v is None else str(v)


def _counts(c):
    return " ".join(f"{k}={v}" for k, v in sorted(c.items())) or "none"


@dataclass
class FuzzStats:
    """Counters and observed extremes of one lockstep run."""

    ops: Counter = field(default_factory=Counter)
    checks: Counter = field(default_factory=Counter)
    violations: Counter = field(default_factory=Counter)
    max_depth: int = 1
    # worst observed slack against the asserted bounds
    # None until a traversal has been seen
    max_outer_minus_2s1: Optional[int] = None
    max_outer_minus_2s_pos: Optional[int] = None
    max_compares_minus_2s: Optional[int] = None
    max_zero_run: int = 0
    max_copies: int = 0
    open_allocs: Counter = field(default_factory=Counter)
    close_steps: Counter = field(default_factory=Counter)

    def note_traversal(self, stats, s):
        self.max_outer_minus_2s1 = _max(self.max_outer_minus_2s1, stats.outer_iters - 2 * (s + 1))
        if s >= 1:
            self.max_outer_minus_2s_pos = _max(self.max_outer_minus_2s_pos,
                                               stats.outer_iters - 2 * s)
        self.max_compares_minus_2s = _max(self.max_compares_minus_2s, stats.compares - 2 * s)
        run = 0
        for d in stats.d_seq:
            run = run + 1 if d == 0 else 0
            self.max_zero_run = max(self.max_zero_run, run)


class Lockstep:
    """Drives a :class:`LifoLexikon` and an :class:`OracleDict` together.

    :param purity: ``"full"`` compares the live arena byte for byte before
        and after every search, ``"off"`` only checks that ``freeloc`` did not
        move.
    :param structure_every: run the full structural walk every this many ops
        (0 disables it).
    """

    def __init__(self, *, splice_rule=K.RULE_TRACKED, purity="full", structure_every=5000,
                 sample_seed=0, capacity=1 << 16):
        self.lx = LifoLexikon(capacity=capacity, splice_rule=splice_rule)
        self.oracle = OracleDict()
        self.purity = purity
        self.structure_every = structure_every
        self.stats = FuzzStats()
        self._rng = random.Random(sample_seed)
        self._envs = []  # (mark, checksum below mark, keys written inside)
        self._touched = set()
        self._clean = None

    def _live_bytes(self):
        return self.lx.arena.data[:self.lx.arena.freeloc].tobytes()

    def _snapshot(self):
        # byte image of the live arena, reused until the next mutation
        if self._clean is None:
            self._clean = self._live_bytes()
        return self._clean

    def _dirty(self):
        self._clean = None

    def _agree(self, i, key):
        self.stats.checks["lookup"] += 1
        got = self.lx.lookup(key)
        want = self.oracle.lookup(key)
        if got != want:
            return Failure(i, "divergence", f"lookup {key}: trie {got!r}, oracle {want!r}")
        return None

    def _violations(self, i, names):
        if names:
            self.stats.violations.update(names)
            return Failure(i, "violation", ", ".join(names))
        return None

    def step(self, i, op) -> Optional[Failure]:
        kind = op[0]
        lx, oracle, st = self.lx, self.oracle, self.stats
        if kind == "close" and oracle.depth() == 1:
            return None
        if kind == "open" and oracle.depth() >= 4096:
            return None
        st.ops[kind] += 1
        if kind in ("insert", "remove"):
            key = op[1]
            if kind == "insert":
                lx.insert(key, op[2])
                oracle.insert(key, op[2])
            else:
                lx.remove(key)
                oracle.remove(key)
            self._dirty()
            self._touched.add(key)
            rep = lx.last_insert
            st.note_traversal(rep, len(key))
            st.max_copies = max(st.max_copies, rep.copies)
            names = insert_violations(rep, len(key))
            if lx.write_violations:
                names.append("frame_locality")
            fail = self._violations(i, names) or self._agree(i, key)
        elif kind == "search":
            key = op[1]
            fl = lx.arena.freeloc
            before = self._snapshot() if self.purity == "full" else None
            got, out = lx.find(key)
            st.note_traversal(out.stats, len(key))
            names = search_violations(out.stats, len(key))
            st.checks["purity"] += 1
            if lx.arena.freeloc != fl or (before is not None and self._live_bytes() != before):
                names.append("search_purity")
            fail = self._violations(i, names)
            if fail is None and got != oracle.lookup(key):
                fail = Failure(i, "divergence",
                               f"search {key}: trie {got!r}, oracle {oracle.lookup(key)!r}")
        elif kind == "open":
            mark = lx.arena.freeloc
            self._envs.append((mark, lx.arena.checksum(0, mark), self._touched))
            self._touched = set()
            had_gate = lx.gate != K.NIL
            lx.open_environment()
            oracle.open()
            self._dirty()
            st.max_depth = max(st.max_depth, oracle.depth())
            st.open_allocs[lx.last_open_allocs] += 1
            names = []
            if lx.last_open_copies != (1 if had_gate else 0) or \
                    lx.last_open_allocs != 1 + lx.last_open_copies:
                names.append("open_cost")
            if lx.write_violations:
                names.append("frame_locality")
            fail = self._violations(i, names)
        elif kind == "close":
            lx.close_environment()
            oracle.close()
            self._dirty()
            mark, crc, touched_outer = self._envs.pop()
            inner = self._touched
            self._touched = touched_outer
            st.close_steps[lx.last_close_steps] += 1
            st.checks["lifo_exact"] += 1
            names = []
            if lx.last_close_steps != CLOSE_STEPS:
                names.append("close_cost")
            if lx.arena.freeloc != mark or lx.arena.checksum(0, mark) != crc:
                names.append("lifo_exact")
            fail = self._violations(i, names)
            if fail is None:
                probe = list(inner)
                if oracle.bindings:
                    keys = list(oracle.bindings) if len(oracle.bindings) <= 4 else \
                        self._rng.sample(list(oracle.bindings), 4)
                    probe.extend(keys)
                for key in probe:
                    fail = self._agree(i, key)
                    if fail:
                        break
        else:
            raise ValueError(f"unknown op {op!r}")
        if fail is None and self.structure_every and i % self.structure_every == 0:
            fail = self.check_structure(i)
        return fail

    def check_structure(self, i):
        self.stats.checks["structure"] += 1
        try:
            self.lx.check()
        except AssertionError as e:
            self.stats.violations["strict_chains"] += 1
            return Failure(i, "violation", f"strict_chains: {e}")
        live = {k: v for k, v in self.lx.items()}
        if live != self.oracle.bindings:
            return Failure(i, "divergence", "trie contents differ from oracle bindings")
        return None

    def run(self, ops) -> Optional[Failure]:
        for i, op in enumerate(ops):
            fail = self.step(i, op)
            if fail is not None:
                return fail
        if self.structure_every:
            return self.check_structure(len(ops))
        return None


def replay(ops, **kw) -> Optional[Failure]:
    return Lockstep(**kw).run(ops)


def minimize(ops, budget_s=20.0, **kw):
    """Shrink a failing op list while it keeps failing (delta debugging)."""
    deadline = time.monotonic() + budget_s
    fail = replay(ops, **kw)
    if fail is None:
        return ops, None
    ops = list(ops[:fail.index + 1])
    chunk = max(1, len(ops) // 2)
    while chunk >= 1 and time.monotonic() < deadline:
        i = 0
        shrunk = False
        while i < len(ops) and time.monotonic() < deadline:
            trial = ops[:i] + ops[i + chunk:]
            f = replay(trial, **kw) if trial else None
            if f is not None:
                ops = trial[:f.index + 1]
                fail = f
                shrunk = True
            else:
                i += chunk
        if not shrunk:
            chunk //= 2
    return ops, fail


def format_op(op):
    kind = op[0]
    if kind in ("open", "close"):
        return kind
    key = "b:" + ("" if len(op[1]) == 0 else str(op[1]))
    if kind == "insert":
        return f"insert {key} {op[2]}"
    return f"{kind} {key}"


@dataclass
class FuzzReport:
    seed: int
    n_ops: int
    failure: Optional[Failure]
    stats: FuzzStats
    elapsed: float
    trace: List[Op] = field(default_factory=list)

    @property
    def passed(self):
        return self.failure is None

    def render(self, timing=False):
        """Text report; wall time only when ``timing`` so reruns are identical."""
        st = self.stats
        head = f"{'PASS' if self.passed else 'FAIL'} seed={self.seed} ops={self.n_ops}"
        lines = [
            head + (f" time={self.elapsed:.2f}s" if timing else ""),
            "ops: " + _counts(st.ops),
            "checks: " + _counts(st.checks),
            f"violations: {sum(st.violations.values())}"
            + "".join(f" {k}={v}" for k, v in sorted(st.violations.items())),
            f"max depth {st.max_depth}; max zero run {st.max_zero_run}; "
            f"max copies/insert {st.max_copies}",
            f"max outer_iters-2(s+1) {_na(st.max_outer_minus_2s1)}; "
            f"max outer_iters-2s (s>=1) {_na(st.max_outer_minus_2s_pos)}; "
            f"max compares-2s {_na(st.max_compares_minus_2s)}",
            "open allocations: " + _counts(st.open_allocs),
            "close steps: " + _counts(st.close_steps),
        ]
        if self.failure:
            f = self.failure
            lines.append(f"failure at op {f.index}: {f.kind}: {f.detail}")
            lines.append(f"reproduce with: fuzz --seed {self.seed} --ops {self.n_ops}")
            lines.append(f"minimized trace ({len(self.trace)} ops):")
            lines.extend("  " + format_op(op) for op in self.trace)
        return "\n".join(lines)


def fuzz(seed=1, n_ops=100_000, max_depth=32, min_bits=0, max_bits=512, *,
         splice_rule=K.RULE_TRACKED, purity="full", structure_every=5000,
         minimize_budget=20.0) -> FuzzReport:
    t0 = time.perf_counter()
    ops = generate_ops(seed, n_ops, max_depth, min_bits, max_bits)
    runner = Lockstep(splice_rule=splice_rule, purity=purity,
                      structure_every=structure_every, sample_seed=seed)
    fail = runner.run(ops)
    trace = []
    if fail is not None:
        trace, shrunk = minimize(ops[:fail.index + 1], budget_s=minimize_budget,
                                 splice_rule=splice_rule, purity=purity,
                                 structure_every=1)
        fail = shrunk or fail
    return FuzzReport(seed, n_ops, fail, runner.stats, time.perf_counter() - t0, trace)
