import io
from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cffkit import (BitFamily, InvalidParams, complement_family, read_matrix,
                    restrict_columns, verify_cff, write_matrix)
from cffkit.core import DesignParams

from oracles import is_cff, rows_of

FOUR = BitFamily(["1100", "1010", "0101", "0011"])


def test_verify_trivial_examples():
    assert verify_cff(BitFamily(["10", "01"]), 1, 1)
    ok, w = verify_cff(BitFamily(["11", "00"]), 1, 1)
    assert not ok
    assert w.index_set == (0, 1) and w.pattern == (0,)
    assert w.describe() == "cff: columns [1 2] pattern 10 not realized"


def test_parameter_errors():
    with pytest.raises(InvalidParams):
        verify_cff(FOUR, 3, 2)
    with pytest.raises(InvalidParams):
        verify_cff(FOUR, 0, 1)
    with pytest.raises(InvalidParams):
        verify_cff(BitFamily([], 4), 1, 1)
    with pytest.raises(InvalidParams):
        DesignParams(4, 1, 4)


def test_minimum_four_one_one():
    assert verify_cff(FOUR, 1, 1)
    vecs = ["".join(b) for b in product("01", repeat=4)]
    for size in (1, 2, 3):
        for rows in combinations(vecs, size):
            assert not verify_cff(BitFamily(list(rows)), 1, 1)


def test_complement_examples():
    assert sorted(complement_family(BitFamily(["10", "01"])).strings()) == ["01", "10"]
    assert complement_family(BitFamily(["10110"])).strings() == ["01001"]
    assert verify_cff(complement_family(FOUR), 1, 1)


def test_restrict_examples():
    assert verify_cff(restrict_columns(FOUR, 3), 1, 1)
    assert restrict_columns(FOUR, 4) is FOUR
    with pytest.raises(InvalidParams):
        restrict_columns(FOUR, 1, d=2)


random_family = st.integers(3, 7).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n),
                                             min_size=1, max_size=14)))


@settings(max_examples=80, deadline=None)
@given(random_family, st.integers(1, 2), st.integers(1, 2))
def test_verifier_matches_oracle_and_duality(nf, r, s):
    n, rows = nf
    if r + s > n:
        return
    F = BitFamily(rows, n)
    v = verify_cff(F, r, s)
    assert bool(v) == is_cff([tuple(x) for x in rows], n, r, s)
    assert bool(v) == bool(verify_cff(complement_family(F), s, r))
    if not v:
        assert v.witness.replay(F)
        assert len(v.witness.index_set) == r + s and len(v.witness.pattern) == r
    else:
        for m in range(r + s, n + 1):
            assert verify_cff(restrict_columns(F, m), r, s)


def test_complement_duality_exhaustive_small():
    vecs = list(product((0, 1), repeat=4))
    for rows in combinations(vecs, 4):
        F = BitFamily(list(rows))
        for r, s in [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2)]:
            assert bool(verify_cff(F, r, s)) == bool(verify_cff(complement_family(F), s, r))


def test_corruption_sensitivity():
    from cffkit import build_cff
    F = BitFamily.from_family(build_cff(6, 1, 2).family)
    rows = F.table
    uniq = np.unique(rows, axis=0)
    for i in range(len(uniq)):
        kept = np.delete(uniq, i, axis=0)
        G = BitFamily(kept, 6)
        # the removed row was the unique realizer of something iff the verdict flips
        unique_realizer = not is_cff(rows_of(G), 6, 1, 2)
        assert bool(verify_cff(G, 1, 2)) != unique_realizer


def test_witness_is_first_lexicographic():
    F = BitFamily(["1100", "1010", "0101"])  # 0011 missing: columns (1,2) lack 01
    ok, w = verify_cff(F, 1, 1)
    assert not ok
    first = next((S, J) for S in combinations(range(4), 2) for J in combinations(range(2), 1)
                 if not any(all(int(row[S[j]]) == (j in J) for j in range(2))
                            for row in F.strings()))
    assert (w.index_set, w.pattern) == first


def test_matrix_format_roundtrip():
    buf = io.StringIO()
    write_matrix(FOUR, 1, 1, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "CFF n=4 r=1 s=1 N=4"
    assert text.endswith("\n") and not any(l != l.rstrip() for l in text.splitlines())
    F, r, s = read_matrix(io.StringIO(text))
    assert (r, s) == (1, 1) and F.strings() == FOUR.strings()
    with pytest.raises(InvalidParams):
        read_matrix(io.StringIO("CFF n=4 r=1 s=1 N=2\n1100\n"))
    with pytest.raises(InvalidParams):
        read_matrix(io.StringIO("CFF n=4 r=1 s=1 N=1\n11x0\n"))


def test_bitfamily_immutable_and_duplicates():
    F = BitFamily(["10", "10", "01"])
    assert F.size == 3
    with pytest.raises(ValueError):
        F.table[0, 0] = 0
    with pytest.raises(InvalidParams):
        BitFamily(["10", "1"])
