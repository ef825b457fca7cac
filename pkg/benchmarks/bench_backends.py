"""Numba kernels vs the pure-numpy fallback.

Each backend runs in its own interpreter because the choice is made at
import time from ``LIFOLEX_BACKEND``.  The child builds a dictionary of n
random s-bit keys, searches every key plus n absent ones, then does an
open/insert/close round.  Counters must match between backends; only the
wall times may differ.

Run: python benchmarks/bench_backends.py [--n 20000] [--s 128] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, random, sys, time
import lifolex
from lifolex import LifoLexikon
from lifolex.fuzz import random_bits

n, s, repeat = map(int, sys.argv[1:4])

def once(seed):
    rng = random.Random(seed)
    keys = [random_bits(rng, s) for _ in range(n)]
    absent = [random_bits(rng, s) for _ in range(n)]
    lx = LifoLexikon()
    t0 = time.perf_counter()
    for i, k in enumerate(keys):
        lx.insert(k, i)
    t1 = time.perf_counter()
    outer = links = 0
    for q in keys + absent:
        st = lx.search(q).stats
        outer += st.outer_iters
        links += st.link_steps
    t2 = time.perf_counter()
    lx.open_environment()
    copies = 0
    for k in keys[: n // 4]:
        lx.insert(k, -1)
        copies += lx.last_insert.copies
    lx.close_environment()
    t3 = time.perf_counter()
    return {"insert": t1 - t0, "search": t2 - t1, "env": t3 - t2,
            "counters": [outer, links, copies, lx.arena.freeloc]}

once(0) if n > 100 else None  # warm-up: JIT compile or load the cache
runs = [once(1) for _ in range(repeat)]
best = {k: min(r[k] for r in runs) for k in ("insert", "search", "env")}
print(json.dumps({"backend": lifolex.BACKEND, "counters": runs[0]["counters"], **best}))
"""


def run_child(backend, n, s, repeat):
    env = dict(os.environ, LIFOLEX_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", CHILD, str(n), str(s), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--s", type=int, default=128)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rows = [run_child(b, args.n, args.s, args.repeat) for b in ("numba", "numpy")]
    print(f"n={args.n} s={args.s} best of {args.repeat}")
    print(f"{'backend':>8} {'insert us/op':>13} {'search us/op':>13} {'env us/op':>10}")
    for r in rows:
        print(f"{r['backend']:>8} {1e6 * r['insert'] / args.n:13.2f} "
              f"{1e6 * r['search'] / (2 * args.n):13.2f} "
              f"{1e6 * r['env'] / max(1, args.n // 4):10.2f}")
    fast, slow = rows
    if fast["backend"] == "numba":
        print(f"search speedup {slow['search'] / fast['search']:.1f}x, "
              f"insert speedup {slow['insert'] / fast['insert']:.1f}x")
    same = fast["counters"] == slow["counters"]
    print("counters identical" if same else f"COUNTER MISMATCH {fast['counters']} "
          f"vs {slow['counters']}")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
