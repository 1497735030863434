import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l1rank.errors import DimensionError, ParseError
from l1rank.gf2core import (
    BitMatrix,
    BitVec,
    PositionSet,
    boolean_matmul,
    column_sum_norm,
    format_matrix,
    gf2_matmul,
    gf2_rank,
    hamming,
    hamming_restricted,
    l1_distance,
    parse_matrix,
    read_matrix,
    write_matrix,
)


def subset_rank(a: BitMatrix) -> int:
    """Rank as log2 of the row-space size, by enumerating all row subsets."""
    span = set()
    for mask in range(1 << a.nrows):
        acc = 0
        for i in range(a.nrows):
            if (mask >> i) & 1:
                acc ^= a.rows[i]
        span.add(acc)
    return len(span).bit_length() - 1


bitstrings = st.integers(1, 24).flatmap(lambda m: st.tuples(st.integers(0, (1 << m) - 1), st.integers(0, (1 << m) - 1), st.just(m)))


def test_bitvec_roundtrip_and_indexing():
    v = BitVec.from_str("10110")
    assert v.to_str() == "10110"
    assert v.to_list() == [1, 0, 1, 1, 0]
    assert v[0] == 1 and v[1] == 0
    assert list(v) == [1, 0, 1, 1, 0]
    assert v.weight() == 3
    assert BitVec.from_bits([1, 0, 1, 1, 0]) == v
    assert BitVec.ones(4).to_str() == "1111"
    assert BitVec.zeros(3).to_str() == "000"


def test_bitvec_rejects_bad_input():
    with pytest.raises(ParseError):
        BitVec.from_str("10a1")
    with pytest.raises(DimensionError):
        hamming(BitVec(3), BitVec(4))


@given(bitstrings)
def test_hamming_is_weight_of_xor(t):
    a, b, m = t
    x, y = BitVec(m, a), BitVec(m, b)
    assert hamming(x, y) == sum(p != q for p, q in zip(x, y)) == (x ^ y).weight()


@given(bitstrings, st.data())
def test_restricted_distances_split(t, data):
    a, b, m = t
    pos = data.draw(st.sets(st.integers(0, m - 1)))
    q = PositionSet(m, pos)
    x, y = BitVec(m, a), BitVec(m, b)
    assert hamming_restricted(x, y, q) + hamming_restricted(x, y, q.complement()) == hamming(x, y)
    assert hamming(x.restrict(q), y.restrict(q)) == hamming_restricted(x, y, q)


def test_restrict_and_concat():
    v = BitVec.from_str("110100")
    q = PositionSet(6, [0, 2, 3])
    assert v.restrict(q).to_str() == "101"
    assert v.concat(BitVec.from_str("01")).to_str() == "11010001"
    assert list(q.complement()) == [1, 4, 5]
    assert len(PositionSet.full(5)) == 5


def test_position_set_rejects_out_of_range():
    with pytest.raises(DimensionError):
        PositionSet(3, [3])


def test_rank_exhaustive_3x3():
    for words in itertools.product(range(8), repeat=3):
        a = BitMatrix(3, 3, list(words))
        assert gf2_rank(a) == subset_rank(a)


def test_rank_random_up_to_5x5():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        a = BitMatrix.from_array(rng.integers(0, 2, size=(m, n)))
        assert gf2_rank(a) == subset_rank(a) == gf2_rank(a.transpose())


def test_rank_examples():
    assert gf2_rank(BitMatrix.identity(5)) == 5
    assert gf2_rank(BitMatrix.zeros(3, 4)) == 0
    assert gf2_rank(BitMatrix.from_rows(["110", "011", "101"])) == 2


def test_column_sum_norm():
    a = BitMatrix.from_rows(["101", "111", "001"])
    assert column_sum_norm(a) == 3
    assert column_sum_norm(BitMatrix.zeros(2, 2)) == 0
    b = BitMatrix.from_rows(["100", "111", "000"])
    assert l1_distance(a, b) == 2


def test_columns_and_transpose():
    a = BitMatrix.from_rows(["10", "01", "11"])
    assert [c.to_str() for c in a.columns()] == ["101", "011"]
    assert BitMatrix.from_columns(a.columns()) == a
    assert a.transpose().transpose() == a
    assert a[2, 1] == 1 and a[0, 1] == 0
    assert np.array_equal(BitMatrix.from_array(a.to_array()).to_array(), a.to_array())


@settings(max_examples=50)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**31))
def test_matmul_matches_numpy(m, r, n, seed):
    rng = np.random.default_rng(seed)
    u = rng.integers(0, 2, size=(m, r))
    v = rng.integers(0, 2, size=(r, n))
    gu, gv = BitMatrix.from_array(u), BitMatrix.from_array(v)
    assert np.array_equal(gf2_matmul(gu, gv).to_array(), (u @ v) % 2)
    assert np.array_equal(boolean_matmul(gu, gv).to_array(), ((u @ v) > 0).astype(int))


def test_matmul_shape_mismatch():
    with pytest.raises(DimensionError):
        gf2_matmul(BitMatrix.zeros(2, 3), BitMatrix.zeros(2, 3))


def test_parse_and_format_roundtrip(tmp_path):
    text = "2 3\n101\n011\n"
    a = parse_matrix(text)
    assert format_matrix(a) == text
    path = tmp_path / "a.mat"
    write_matrix(a, path)
    assert read_matrix(path) == a
    assert path.read_text() == text


@pytest.mark.parametrize(
    "text, where",
    [
        ("", ":1:1:"),
        ("2 x\n", ":1:1:"),
        ("2 3\n101\n", ":3:1:"),
        ("2 3\n101\n0110\n", ":3:4:"),
        ("2 3\n101\n0a1\n", ":3:2:"),
    ],
)
def test_parse_errors_cite_position(text, where):
    with pytest.raises(ParseError) as info:
        parse_matrix(text, source="m.mat")
    assert f"m.mat{where}" in str(info.value)
