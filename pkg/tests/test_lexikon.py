import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lifolex import NIL, Arena, ArenaFull, BitString, EMPTY, Lexikon, encode_key
from lifolex.fuzz import search_violations
from lifolex.lexikon import check_chains, read_bits, read_node

from conftest import B


def three_keys():
    lx = Lexikon()
    lx.insert(B("0"), "A")
    lx.insert(B("00"), "B")
    lx.insert(B("1"), "C")
    return lx


def test_empty_search():
    out = Lexikon().search(B("0101"))
    assert not out.found
    assert out.findpos == NIL and out.insertpos == NIL
    assert out.d == 0
    assert out.remainder == B("0101")


def test_single_key_hit():
    lx = Lexikon()
    lx.insert(B("0"), "A")
    out = lx.search(B("0"))
    assert out.found and lx.lookup(B("0")) == "A"
    assert out.stats.compares == 1
    # a hit on the first compare produces no divergence index
    assert out.stats.outer_iters == 0 and out.stats.d_seq == ()


def test_three_key_searches():
    lx = three_keys()
    out = lx.search(B("00"))
    assert out.found
    assert out.stats.d_seq == (1,)
    assert out.stats.link_steps == 1
    out = lx.search(B("1"))
    assert out.found
    assert out.stats.d_seq == (0,)


def test_three_key_layout():
    lx = three_keys()
    gate = read_node(lx.arena, lx.gate)
    assert read_bits(lx.arena, gate.rkey) == B("0") and gate.dist == 0
    first = read_node(lx.arena, gate.branch)
    second = read_node(lx.arena, first.link)
    assert (first.dist, read_bits(lx.arena, first.rkey)) == (0, B("1"))
    assert (second.dist, read_bits(lx.arena, second.rkey)) == (1, B("0"))
    assert second.link == NIL
    assert lx.dump() == "[0] 0 = A\n  [0] 1 = C\n  [1] 0 = B"


def test_absent_sibling_branch():
    lx = Lexikon()
    lx.insert(B("0" + "10110011"), 1)
    assert not lx.search(B("1" + "00001111")).found


def test_first_insert_is_gate():
    lx = Lexikon()
    lx.insert(B("0100"), "A")
    g = read_node(lx.arena, lx.gate)
    assert g.dist == 0 and read_bits(lx.arena, g.rkey) == B("0100")


def test_overwrite_allocates_nothing():
    lx = Lexikon()
    lx.insert(B("0100"), "A")
    before = lx.arena.freeloc
    lx.insert(B("0100"), "B")
    assert lx.lookup(B("0100")) == "B"
    assert lx.arena.freeloc == before
    assert check_chains(lx.arena, lx.gate) == 1


def test_lookup_basics():
    lx = Lexikon()
    assert lx.lookup(B("1")) is None
    lx.insert(B("1"), 7)
    assert lx.lookup(B("1")) == 7
    assert B("1") in lx and B("0") not in lx


def test_year_of_birth_names():
    lx = Lexikon()
    for name, year in [("ALFRED", 1940), ("ALBERT", 1955), ("PETRA", 1960), ("PETER", 1965)]:
        lx.insert(name, year)
    assert [lx.lookup(n) for n in ("ALFRED", "ALBERT", "PETRA", "PETER")] == [1940, 1955, 1960,
                                                                               1965]
    assert lx.lookup("PAUL") is None


def test_dump_empty_and_single():
    lx = Lexikon()
    assert lx.dump() == "(empty)"
    lx.insert(B("0110"), 5)
    assert lx.dump() == "[0] 0110 = 5"


def test_prefix_keys_get_empty_suffix():
    lx = Lexikon()
    lx.insert(B("0110"), 1)
    lx.insert(B("01"), 2)
    assert lx.dump() == '[0] 0110 = 1\n  [2] "" = 2'
    assert lx.lookup(B("01")) == 2 and lx.lookup(B("0110")) == 1


def test_exhaustion_leaves_dictionary_unchanged():
    lx = Lexikon(Arena(capacity=64, max_capacity=64))
    lx.insert(B("0"), 1)
    snap = lx.arena.data[:lx.arena.freeloc].tobytes(), lx.gate
    with pytest.raises(ArenaFull):
        lx.insert(B("1" * 200), 2)
    assert (lx.arena.data[:lx.arena.freeloc].tobytes(), lx.gate) == snap
    assert lx.lookup(B("0")) == 1


def test_items_reconstruct_full_keys():
    keys = ["0", "00", "1", "0110", "01", "", "111"]
    lx = Lexikon()
    for i, k in enumerate(keys):
        lx.insert(B(k), i)
    assert dict(lx.items()) == {B(k): i for i, k in enumerate(keys)}


# s = 0: three compares and two recorded divergences
def test_compares_reach_two_s_plus_three():
    lx = Lexikon()
    for k in ("1001", "0110", ""):
        lx.insert(B(k), k)
    st_ = lx.search(EMPTY).stats
    assert st_.compares == 3
    assert st_.outer_iters == 2 == 2 * (0 + 1)


def test_outer_iters_can_exceed_two_s():
    lx = Lexikon()
    for k in ("101", "010", "001"):
        lx.insert(B(k), k)
    st_ = lx.search(B("0")).stats
    assert st_.d_seq == (0, 1, 0)
    assert st_.outer_iters == 3 > 2 * 1
    assert not search_violations(st_, 1)


short = st.lists(st.integers(0, 1), max_size=12)


@st.composite
def prefix_family(draw):
    """Keys u, u0v, u1w."""
    u, v, w = draw(short), draw(short), draw(short)
    return [u, u + [0] + v, u + [1] + w]


keylists = st.lists(st.lists(st.integers(0, 1), max_size=40), max_size=40)


@settings(max_examples=150, deadline=None)
@given(keylists, st.data())
def test_matches_assoc_list(raw, data):
    if data.draw(st.booleans()):
        raw = raw + data.draw(prefix_family())
    lx = Lexikon()
    assoc = []
    for i, bits in enumerate(raw):
        k = BitString.from_bits(bits)
        lx.insert(k, i)
        assoc = [(kk, vv) for kk, vv in assoc if kk != k] + [(k, i)]
        assert not search_violations(lx.search(k).stats, len(k))
    check_chains(lx.arena, lx.gate)
    for k, v in assoc:
        assert lx.lookup(k) == v
    probes = data.draw(st.lists(st.lists(st.integers(0, 1), max_size=40), max_size=20))
    for p in probes:
        k = BitString.from_bits(p)
        want = next((v for kk, v in assoc if kk == k), None)
        out = lx.search(k)
        assert lx.lookup(k) == want
        assert not search_violations(out.stats, len(k))


def test_search_is_pure():
    rng = np.random.default_rng(11)
    lx = Lexikon()
    keys = [BitString.from_bits(rng.integers(0, 2, rng.integers(0, 64))) for _ in range(300)]
    for i, k in enumerate(keys):
        lx.insert(k, i)
    before = lx.arena.data[:lx.arena.freeloc].tobytes(), lx.arena.freeloc, lx.arena.n_allocs
    for k in keys:
        lx.search(k)
        lx.search(k + B("1"))
    after = lx.arena.data[:lx.arena.freeloc].tobytes(), lx.arena.freeloc, lx.arena.n_allocs
    assert before == after


def test_byte_keys_and_bitstring_keys_agree():
    lx = Lexikon()
    lx.insert("AB", 1)
    assert lx.lookup(encode_key(b"AB")) == 1
    assert lx.lookup(B("0100000101000010")) == 1
