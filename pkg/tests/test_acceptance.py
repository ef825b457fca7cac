"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in
the terminal summary) or directly with ``python tests/test_acceptance.py``.
"""
import random
import time

import pytest

from lifolex import LifoLexikon
from lifolex.fuzz import CLOSE_STEPS, fuzz, random_bits

FUZZ_SEEDS = range(1, 11)
FUZZ_OPS = 100_000
FUZZ_BUDGET_S = 60.0
LOOKUP_BUDGET_S = 1e-3

RESULTS = []


def report(num, title, ok, detail):
    line = f"criterion {num} {title}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS.append(line)
    print(line)
    return ok


_fuzz_cache = {}


def fuzz_campaign():
    if "runs" not in _fuzz_cache:
        fuzz(seed=0, n_ops=200)  # compile kernels outside the timed window
        t0 = time.perf_counter()
        runs = [fuzz(seed=s, n_ops=FUZZ_OPS, max_depth=32, min_bits=0, max_bits=512,
                     structure_every=10_000) for s in FUZZ_SEEDS]
        _fuzz_cache["runs"] = runs
        _fuzz_cache["elapsed"] = time.perf_counter() - t0
    return _fuzz_cache["runs"], _fuzz_cache["elapsed"]


def _violations(runs, names):
    return sum(r.stats.violations[n] for r in runs for n in names)


def _failed_on(runs, names):
    # a run halts at its first failure, so name it explicitly
    return [r.seed for r in runs if r.failure and any(n in r.failure.detail for n in names)]


def _names_example():
    lx = LifoLexikon()
    for name, year in [("ALFRED", 1940), ("ALBERT", 1955), ("PETRA", 1960), ("PETER", 1965)]:
        lx.insert(name, year)
    return [lx.lookup(n) for n in ("ALFRED", "ALBERT", "PETRA", "PETER", "PAUL")]


def test_criterion_1_worked_example():
    _names_example()
    best = float("inf")
    for _ in range(20):
        t0 = time.perf_counter()
        got = _names_example()
        best = min(best, time.perf_counter() - t0)
    ok = got == [1940, 1955, 1960, 1965, None] and best < LOOKUP_BUDGET_S
    assert report(1, "worked example", ok, f"lookups {got}, {best * 1e6:.0f} us")


def test_criterion_2_oracle_equivalence():
    runs, elapsed = fuzz_campaign()
    failed = [r.seed for r in runs if not r.passed]
    ops = sum(sum(r.stats.ops.values()) for r in runs)
    depth = max(r.stats.max_depth for r in runs)
    ok = not failed and elapsed < FUZZ_BUDGET_S and depth == 32
    assert report(2, "oracle equivalence", ok,
                  f"{len(runs)} runs, {ops} ops, max depth {depth}, failed seeds {failed}, "
                  f"{elapsed:.1f} s")


def test_criterion_3_search_bound():
    runs, _ = fuzz_campaign()
    names = ("outer_bound", "distance_budget", "chain_steps", "zero_run")
    bad = _violations(runs, names) + len(_failed_on(runs, names))
    slack = max(r.stats.max_outer_minus_2s1 for r in runs)
    zeros = max(r.stats.max_zero_run for r in runs)
    ok = bad == 0 and all(r.passed for r in runs)
    assert report(3, "search bound", ok,
                  f"{bad} violations, max outer_iters-2(s+1) = {slack}, longest zero run {zeros}")


def test_criterion_4_lifo_exactness():
    runs, _ = fuzz_campaign()
    pairs = sum(r.stats.checks["lifo_exact"] for r in runs)
    bad = _violations(runs, ("lifo_exact",)) + len(_failed_on(runs, ("lifo_exact",)))
    diverged = [r.seed for r in runs if r.failure and r.failure.kind == "divergence"]
    ok = bad == 0 and not diverged and pairs > 0 and all(r.passed for r in runs)
    assert report(4, "LiFo exactness", ok,
                  f"{pairs} open/close pairs checked, {bad} checksum mismatches, "
                  f"lookup divergences in seeds {diverged}")


def _env_cost(n, rng):
    lx = LifoLexikon(capacity=1 << 22)
    keys = [random_bits(rng, 64) for _ in range(n)]
    for i, k in enumerate(keys):
        lx.insert(k, i)
    lx.open_environment()
    opened = (lx.last_open_allocs, lx.last_open_copies)
    for k in rng.sample(keys, min(n, 500)):
        lx.insert(k, -1)
    lx.close_environment()
    return opened, lx.last_close_steps


def test_criterion_5_constant_environment_ops():
    rng = random.Random(5)
    costs = {n: _env_cost(n, rng) for n in (10, 1_000, 100_000)}
    close = {c for _, c in costs.values()}
    opens = {o for o, _ in costs.values()}
    runs, _ = fuzz_campaign()
    fuzz_close = set().union(*(r.stats.close_steps for r in runs))
    fuzz_bad = _violations(runs, ("open_cost", "close_cost"))
    ok = (close == {CLOSE_STEPS} and fuzz_close <= {CLOSE_STEPS} and opens == {(2, 1)}
          and fuzz_bad == 0)
    assert report(5, "constant-time environment ops", ok,
                  f"close steps {sorted(close)} for n=10/1e3/1e5, open = 1 frame + "
                  f"{sorted(c for _, c in opens)} node copy, fuzz cost violations {fuzz_bad}")


def test_criterion_6_insert_linear():
    runs, _ = fuzz_campaign()
    names = ("insert_copies", "insert_steps", "frame_locality")
    bad = _violations(runs, names) + len(_failed_on(runs, names))
    inserts = sum(r.stats.ops["insert"] + r.stats.ops["remove"] for r in runs)
    most = max(r.stats.max_copies for r in runs)
    ok = bad == 0 and inserts > 0 and all(r.passed for r in runs)
    assert report(6, "insert O(s)", ok,
                  f"{inserts} inserts, {bad} violations, max copies per insert {most}")


def test_criterion_7_search_purity():
    runs, _ = fuzz_campaign()
    checked = sum(r.stats.checks["purity"] for r in runs)
    searches = sum(r.stats.ops["search"] for r in runs)
    bad = _violations(runs, ("search_purity",)) + len(_failed_on(runs, ("search_purity",)))
    ok = bad == 0 and checked == searches > 0 and all(r.passed for r in runs)
    assert report(7, "search purity", ok, f"{checked} searches byte-compared, {bad} violations")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
