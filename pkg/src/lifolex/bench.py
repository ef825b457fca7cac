"""Counter-based complexity benchmark.

For each ``(n, s)`` pair: insert ``n`` random ``s``-bit keys, search every
one of them plus as many absent keys, then open an environment, overwrite or
add a sample of keys inside it and close it again.  Every operation's
counters are checked against the linear bounds; wall time is reported but
never judged.
"""
import random
import time
from dataclasses import dataclass, field
from typing import List

from .fuzz import CLOSE_STEPS, insert_violations, random_bits, search_violations
from .lifo import LifoLexikon

ENV_SAMPLE = 1000


@dataclass
class BenchRow:
    n: int
    s: int
    searches: int
    max_outer: int
    mean_outer: float
    max_links: int
    mean_links: float
    max_compares: int
    env_inserts: int
    max_copies: int
    mean_copies: float
    open_allocs: int
    close_steps: int
    us_per_search: float
    violations: int


@dataclass
class BenchReport:
    seed: int
    rows: List[BenchRow] = field(default_factory=list)

    @property
    def violations(self):
        return sum(r.violations for r in self.rows)

    def render(self, timing=False):
        head = ("n", "s", "searches", "max_r", "mean_r", "max_link", "mean_link", "max_cmp",
                "env_ins", "max_copy", "mean_copy", "open_alloc", "close_steps", "violations")
        body = [(r.n, r.s, r.searches, r.max_outer, f"{r.mean_outer:.2f}", r.max_links,
                 f"{r.mean_links:.2f}", r.max_compares, r.env_inserts, r.max_copies,
                 f"{r.mean_copies:.2f}", r.open_allocs, r.close_steps, r.violations)
                for r in self.rows]
        if timing:
            head += ("us/search",)
            body = [row + (f"{r.us_per_search:.1f}",) for row, r in zip(body, self.rows)]
        cols = [head] + [tuple(str(c) for c in row) for row in body]
        widths = [max(len(row[i]) for row in cols) for i in range(len(head))]
        lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cols]
        lines.append(f"bound violations: {self.violations}")
        return "\n".join(lines)


def bench_one(n, s, rng) -> BenchRow:
    lx = LifoLexikon()
    keys = [random_bits(rng, s) for _ in range(n)]
    violations = 0
    for i, k in enumerate(keys):
        lx.insert(k, i)
        violations += len(insert_violations(lx.last_insert, s))
    queries = keys + [random_bits(rng, s) for _ in range(n)]
    outer = links = cmp_max = 0
    max_outer = max_links = 0
    t0 = time.perf_counter()
    for q in queries:
        _, out = lx.find(q)
        st = out.stats
        outer += st.outer_iters
        links += st.link_steps
        max_outer = max(max_outer, st.outer_iters)
        max_links = max(max_links, st.link_steps)
        cmp_max = max(cmp_max, st.compares)
        violations += len(search_violations(st, s))
    wall = time.perf_counter() - t0

    lx.open_environment()
    open_allocs = lx.last_open_allocs
    if open_allocs != 2:
        violations += 1
    sample = rng.sample(keys, min(len(keys), ENV_SAMPLE // 2))
    sample += [random_bits(rng, s) for _ in range(ENV_SAMPLE - len(sample))]
    copies = []
    for k in sample:
        lx.insert(k, -1)
        violations += len(insert_violations(lx.last_insert, s))
        copies.append(lx.last_insert.copies)
    lx.close_environment()
    if lx.last_close_steps != CLOSE_STEPS:
        violations += 1

    return BenchRow(
        n=n, s=s, searches=len(queries),
        max_outer=max_outer, mean_outer=outer / len(queries),
        max_links=max_links, mean_links=links / len(queries),
        max_compares=cmp_max,
        env_inserts=len(sample), max_copies=max(copies), mean_copies=sum(copies) / len(copies),
        open_allocs=open_allocs, close_steps=lx.last_close_steps,
        us_per_search=1e6 * wall / len(queries),
        violations=violations,
    )


def bench(n_list, s_list, seed=0) -> BenchReport:
    if not n_list or not s_list:
        raise ValueError("n_list and s_list must be non-empty")
    report = BenchReport(seed)
    for s in s_list:
        for n in n_list:
            report.rows.append(bench_one(n, s, random.Random(f"{seed}:{n}:{s}")))
    return report
