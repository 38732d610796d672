import io
from itertools import combinations

import numpy as np
import pytest

from cffkit import CapacityError, from_descriptor, read_fn_family, tree_size, write_fn_family
from cffkit.construct import build_cff_construction1, build_cff_construction2, build_mcff
from cffkit.family import (Composed, Constant, Identity, ProductBlocks, Table, Union,
                           unique_rows)
from cffkit.hashing import build_dense_shf, build_phf
from cffkit.separators import build_min_separating
from cffkit.splitters import build_splitter


def lazy_zoo():
    return [
        build_phf(30, 5, 2, relaxed=True),
        build_dense_shf(40, 25, 1, 1),
        build_splitter(16, 4, 2),
        build_splitter(14, 8, 4, z=2),
        build_cff_construction1(12, 2, 2, 2),
        build_cff_construction2(12, 2, 4, 2),
        build_mcff(5, ((1, 1), (1, 2))),
        build_min_separating(7, 2, 3),
        Union([Constant(5, 3, 1), Constant(5, 3, 2)]),
        ProductBlocks([Table([[0, 1, 2]], 3), Table([[1, 1, 0], [2, 0, 1]], 3)]),
    ]


@pytest.mark.parametrize("fam", lazy_zoo(), ids=lambda f: f.kind)
def test_rows_patterns_array_agree(fam):
    arr = fam.to_array()
    assert arr.shape == (fam.size, fam.n)
    rng = np.random.default_rng(1)
    for i in rng.integers(0, fam.size, size=min(fam.size, 25)):
        assert (fam.row(int(i)) == arr[int(i)]).all()
        assert (fam.row(int(i)) == fam.row(int(i))).all()
    for w in (1, 2, 3):
        for _ in range(4):
            cols = np.sort(rng.choice(fam.n, size=min(w, fam.n), replace=False))
            got = fam.patterns(cols)
            want = unique_rows(arr[:, cols], fam.q)
            assert (got == want).all()
    assert tree_size(fam.tree()) == fam.size


@pytest.mark.parametrize("fam", lazy_zoo()[:8], ids=lambda f: f.kind)
def test_descriptor_roundtrip(fam):
    buf = io.StringIO()
    write_fn_family(fam, buf, materialize=False)
    again = read_fn_family(io.StringIO(buf.getvalue()))
    assert (again.to_array() == fam.to_array()).all()


def test_materialized_fnf_roundtrip_one_based():
    T = Table([[0, 2, 1], [1, 1, 0]], 3, kind="demo")
    buf = io.StringIO()
    write_fn_family(T, buf)
    assert buf.getvalue() == "FNF n=3 q=3 N=2 kind=demo\n1 3 2\n2 2 1\n"
    assert (read_fn_family(io.StringIO(buf.getvalue())).to_array() == T.to_array()).all()


def test_capacity_cap(monkeypatch):
    monkeypatch.setenv("CFFKIT_MAX_MEMBERS", "2")
    fam = build_phf(30, 5, 2, relaxed=True)
    with pytest.raises(CapacityError):
        fam.to_array()
    assert fam.row(3).shape == (30,)


def test_composed_indexing():
    outer = Table([[0, 1, 2], [2, 1, 0]], 3)
    inner = Table([[0, 0, 1], [1, 0, 0], [0, 1, 0]], 2)
    C = Composed(outer, inner)
    assert C.size == 6
    assert list(C.row(1)) == list(inner.table[1][outer.table[0]])
    assert list(C.row(5)) == list(inner.table[2][outer.table[1]])


def test_union_locate_and_identity():
    U = Union([Table([[0, 1]], 2), Table([[1, 1], [0, 0]], 2)], ["a", "b"])
    assert U.locate(2)[0] == "b" and U.size == 3
    with pytest.raises(IndexError):
        U.row(3)
    assert list(Identity(3, 5).patterns(np.array([2, 0]))[0]) == [2, 0]
