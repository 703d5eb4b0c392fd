import random

import pytest
from hypothesis import given, settings, strategies as st

from _oracles import all_factorization_costs, iter_cln_exhaustive, reduced_words
from burnside_lab.codes import (
    DecodeError,
    PCodeError,
    block_cost,
    cln,
    count_by_cln,
    decode,
    decode_text,
    encode_min,
    format_code,
    parse_code,
    pcode,
)
from burnside_lab.words import free_reduce, parse_word, periodic_word, primitive_root

x1, x2 = 1, 2
X1, X2 = -1, -2

words2 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=60).map(lambda w: free_reduce(w))


# ------------------------------------------------------------ pcode


def test_pcode_examples():
    c = pcode((x1, x2), (x1, x2) * 8)
    assert format_code(c) == "0 x1x2 10000" and len(c) == 8
    c = pcode((x1,), (x1, x1))
    assert format_code(c) == "0 x1 10" and len(c) == 4
    c = pcode((x1, x2), (x1, x2, x1))
    assert format_code(c) == "0 x1x2 11" and len(c) == 5


@pytest.mark.parametrize(
    "a, w, reason",
    [
        ((x1, x2), (x1, x2), "period too long"),
        ((x1, x1), (x1,) * 6, "period is a proper power"),
        ((x1, x2, X1), (x1, x2, X1) * 2, "period not cyclically reduced"),
        ((x1, x2), (x1, x2, x2), "word is not periodic with this period"),
        ((), (x1,), "empty period"),
        ((x1,), (), "empty word"),
    ],
)
def test_pcode_rejects(a, w, reason):
    with pytest.raises(PCodeError) as err:
        pcode(a, w)
    assert err.value.reason == reason


# ------------------------------------------------------------ encoder


def test_cln_examples():
    assert cln((x1,)) == 1
    assert encode_min((x1,)).runs == ()
    enc = encode_min((x1, x2) * 8)
    assert enc.cln == 8 and len(enc.runs) == 1
    assert format_code(enc.code) == "0 x1x2 10000"


def test_encoding_segments_reassemble():
    w = parse_word("x3" + "x1" * 7 + "x2" * 7 + "X1")
    enc = encode_min(w)
    assert format_code(enc.code) == "x3 0 x1 111 0 x2 111 X1"
    assert sum((seg for _, seg in enc.segments()), ()) == w


def test_dp_matches_exhaustive_factorizations_small():
    for n in range(1, 8):
        for w in reduced_words(2, n):
            assert cln(w) == min(all_factorization_costs(w))


def test_dp_matches_exhaustive_prefix_oracle():
    # every legal period of every segment, for all reduced words of length <= 9
    for w, c in iter_cln_exhaustive(2, 9):
        assert cln(w) == c


def test_roundtrip_exhaustive_small():
    for n in range(0, 9):
        for w in reduced_words(2, n):
            enc = encode_min(w)
            assert decode(enc.code) == w
            assert decode_text(format_code(enc.code)) == w
            assert len(enc.code) == enc.cln


@settings(max_examples=300)
@given(words2)
def test_roundtrip_random(w):
    enc = encode_min(w)
    assert decode(enc.code) == w
    assert enc.cln <= len(w)


def test_roundtrip_long_periodic_words():
    rng = random.Random(3)
    for _ in range(300):
        a = tuple(rng.choice([1, -1, 2, -2, 3]) for _ in range(rng.randint(1, 6)))
        w = free_reduce(a * rng.randint(1, 40) + tuple(rng.choice([1, 2]) for _ in range(rng.randint(0, 10))))
        assert decode(encode_min(w).code) == w


def test_unreduced_input_flagged():
    w = (x1, X1, x1, X1, x1, X1, x1, X1)
    enc = encode_min(w)
    assert not enc.reduced
    assert decode(enc.code) == w


@given(words2, words2)
def test_subadditive_string_concatenation(u, v):
    assert cln(u + v) <= cln(u) + cln(v)


def test_subadditive_many():
    rng = random.Random(11)
    for _ in range(10_000):
        u = tuple(rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 30)))
        v = tuple(rng.choice([1, 2]) for _ in range(rng.randint(0, 30)))
        assert cln(u + v) <= cln(u) + cln(v)


@given(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=5), st.integers(2, 200))
def test_periodic_word_bound(a, length):
    a = free_reduce(a)
    if not a or a[0] == -a[-1]:
        return
    root, _ = primitive_root(a)
    if length <= len(root):
        return
    w = periodic_word(root, length)
    assert cln(w) <= block_cost(len(root), length)


# ------------------------------------------------------------ decoder errors


def test_decode_examples():
    assert decode_text("0 x1x2 110") == (x1, x2) * 3
    assert decode_text("x1X2x1") == (x1, X2, x1)
    assert decode_text("") == ()


@pytest.mark.parametrize(
    "text, offset",
    [
        ("x1 10", 0),  # no marker before the period
        ("0 x1 01", 5),  # leading zero
        ("1 x1 10", 0),  # marker must be 0
        ("0 x1x2 10", 7),  # run length not larger than the period
        ("0 x1x1 101", 2),  # period is a proper power
        ("0 x1X1 101", 2),  # period not reduced
        ("x1 ?", 3),
        ("0 10", 0),  # the marker is read as a leading zero of the length
    ],
)
def test_decode_errors_carry_offsets(text, offset):
    with pytest.raises(DecodeError) as err:
        decode_text(text)
    assert err.value.offset == offset


def test_parse_code_offsets():
    items, offsets = parse_code("0 x12 1")
    assert items == ("0", 12, "1") and offsets == [0, 2, 6]


# ------------------------------------------------------------ census by code length


def test_count_by_cln_examples():
    assert count_by_cln(2, 0) == 1
    assert count_by_cln(3, 0) == 1
    assert count_by_cln(2, 1) == 4


def test_count_by_cln_matches_exhaustive():
    # cln <= 5 allows at most one block, of cost 1 + 1 + bitlen(7), so lengths stay <= 7
    frozen = [1, 4, 12, 36, 108, 332]
    for k in range(1, 6):
        assert count_by_cln(2, k) == frozen[k]
    counts = {}
    for w, c in iter_cln_exhaustive(2, 7):
        counts[c] = counts.get(c, 0) + 1
    for k in range(1, 6):
        assert counts.get(k, 0) == frozen[k]


def test_count_by_cln_bound_and_jobs():
    assert count_by_cln(2, 6, jobs=1) == count_by_cln(2, 6, jobs=4) == 1040
    assert 1040 <= 6**6
