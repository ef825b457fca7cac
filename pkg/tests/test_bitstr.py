import pytest
from hypothesis import given, strategies as st

from lifolex import EMPTY, BitString, DivKind, decode_key, divergence, encode_key, suffix

from conftest import B

bitlists = st.lists(st.integers(0, 1), max_size=300)


def test_encode_examples():
    assert len(encode_key(b"")) == 0
    assert encode_key(b"") == EMPTY
    assert str(encode_key(b"\x41")) == "01000001"
    assert str(encode_key("A")) == "01000001"
    assert str(encode_key(b"\x41\x42")) == "0100000101000010"


def test_divergence_examples():
    assert divergence(B("0110"), B("0110")).kind is DivKind.EQUAL
    assert divergence(B("0110"), B("0110")).d is None
    assert tuple(divergence(B("0110"), B("0100"))) == (DivKind.MISMATCH, 2)
    assert tuple(divergence(B("01"), B("0110"))) == (DivKind.PREFIX, 2)
    assert tuple(divergence(EMPTY, B("0"))) == (DivKind.PREFIX, 0)


def test_suffix_examples():
    assert suffix(B("0110"), 0) == B("0110")
    assert suffix(B("0110"), 2) == B("10")
    assert suffix(B("0110"), 4) == EMPTY


@pytest.mark.parametrize("d", [-1, 5])
def test_suffix_out_of_range(d):
    with pytest.raises(ValueError):
        suffix(B("0110"), d)


def test_text_form():
    assert str(EMPTY) == '""'
    assert BitString.from_bits('""') == EMPTY
    assert repr(B("101")) == "BitString('101')"
    with pytest.raises(ValueError):
        BitString.from_bits("012")


def test_indexing_and_slicing():
    x = B("10110")
    assert [x[i] for i in range(5)] == [1, 0, 1, 1, 0]
    assert x[-1] == 0
    assert x[1:4] == B("011")
    with pytest.raises(IndexError):
        x[5]


def test_offset_views_compare_by_value():
    x = encode_key(b"\xf0\x0f")
    v = suffix(x, 3)
    assert v == B("1000000001111")
    assert hash(v) == hash(B("1000000001111"))
    assert v + B("1") == B("10000000011111")


def test_immutable_buffer():
    x = B("1010")
    buf, _, _ = x.packed
    with pytest.raises(ValueError):
        buf[0] = 0


def test_record_layout():
    rec = B("1").to_record()
    assert len(rec) % 8 == 0
    assert rec[:8] == (1).to_bytes(8, "little")
    assert rec[8] == 0x80


@given(bitlists, bitlists)
def test_divergence_symmetric(a, b):
    x, y = BitString.from_bits(a), BitString.from_bits(b)
    assert divergence(x, y) == divergence(y, x)


@given(bitlists, bitlists)
def test_divergence_matches_naive(a, b):
    x, y = BitString.from_bits(a), BitString.from_bits(b)
    got = divergence(x, y)
    if a == b:
        assert got.kind is DivKind.EQUAL
        return
    m = min(len(a), len(b))
    i = next((i for i in range(m) if a[i] != b[i]), m)
    assert got.d == i
    assert got.kind is (DivKind.MISMATCH if i < m else DivKind.PREFIX)
    sx, sy = suffix(x, i), suffix(y, i)
    # the two tails part at their first bit, or one of them is empty
    assert (len(sx) == 0) != (len(sy) == 0) or sx[0] != sy[0]


@given(bitlists)
def test_self_divergence_is_equal(a):
    x = BitString.from_bits(a)
    assert divergence(x, x).kind is DivKind.EQUAL


@given(st.binary(max_size=64))
def test_encode_roundtrip(raw):
    assert decode_key(encode_key(raw)) == raw


@given(st.binary(max_size=16), st.binary(max_size=16))
def test_encode_injective(a, b):
    assert (encode_key(a) == encode_key(b)) == (a == b)


@given(bitlists, st.data())
def test_suffix_matches_list_slice(a, data):
    d = data.draw(st.integers(0, len(a)))
    assert list(suffix(BitString.from_bits(a), d).bits()) == a[d:]


def test_decode_rejects_partial_bytes():
    with pytest.raises(ValueError):
        decode_key(B("101"))
