import math

import numpy as np
import pytest

from cffkit import (InvalidParams, appendixA_report, build_splitter, build_splitter_base,
                    splitter_params, verify_splitter)
from cffkit.family import Constant, Table
from cffkit.splitters import Stitched, unrank_combination, z_value
from itertools import combinations

import oracles
from oracles import is_splitter, rows_of


def test_params_examples():
    assert splitter_params(16, 4).z == 32.0
    assert math.isclose(splitter_params(1, 1).sigma, float(oracles.sigma(1, 1)), rel_tol=1e-13)
    assert math.isclose(splitter_params(1, 1).sigma, 2.7245, abs_tol=1e-4)
    s22 = splitter_params(2, 2).sigma
    assert math.isclose(s22, float(oracles.sigma(2, 2)), rel_tol=1e-13)
    assert math.isclose(s22, 2 * math.pi * math.exp(1 / 6), rel_tol=1e-13)
    assert math.isclose(s22, 7.4227, abs_tol=1e-4)  # not 7.4236
    with pytest.raises(InvalidParams):
        splitter_params(2, 3)


def test_divisibility_adjustment():
    p = splitter_params(6, 4)
    assert p.k_eff == 3 and p.adjusted
    assert p.k_eff % p.z_eff == 0 and 6 % p.k_eff == 0
    p = splitter_params(16, 4)
    assert (p.k_eff, p.z_eff) == (4, 4)  # z = 32 rounds to the largest divisor
    assert splitter_params(8, 4, z=2).z_eff == 2
    with pytest.raises(InvalidParams):
        splitter_params(8, 4, z=3)


def test_base_examples():
    assert isinstance(build_splitter_base(7, 3, 1), Constant)
    H = build_splitter_base(4, 2, 2)
    assert H.size == 2 and is_splitter(rows_of(H), 4, 2, 2)
    spec = Table([[0, 1, 0, 1], [0, 0, 1, 1]], 2)
    assert verify_splitter(spec, 2, 2)


def test_verify_examples():
    ok, w = verify_splitter(Table([[0, 1, 0, 1]], 2), 2, 2)
    assert not ok and w.index_set == (0, 2) and w.replay(Table([[0, 1, 0, 1]], 2))
    assert verify_splitter(Constant(5, 1), 3, 1)


@pytest.mark.parametrize("m", [4, 6, 9, 12, 16])
@pytest.mark.parametrize("r", [2, 3, 4])
def test_base_grid(m, r):
    for k in range(1, r + 1):
        if r > m:
            continue
        H = build_splitter_base(m, r, k)
        assert verify_splitter(H, r, k)
        if m <= 9:
            assert is_splitter(rows_of(H), m, r, k)


@pytest.mark.parametrize("n", range(4, 17))
def test_build_grid(n):
    for r in range(1, 5):
        for k in [x for x in range(1, r + 1) if r % x == 0]:
            H = build_splitter(n, r, k)
            assert H.q == k
            assert verify_splitter(H, r, k)


def test_k_one_constant():
    H = build_splitter(30, 7, 1)
    assert H.size == 1


def test_stitching_offsets():
    piece = Table([[0, 1, 1, 0, 1, 0], [1, 0, 0, 1, 1, 0]], 2)
    S = Stitched(6, 2, piece, 2)
    assert S.q == 4
    assert S.size == math.comb(5, 1) * 2**2
    for i in range(S.size):
        c, j = divmod(i, 4)
        cut = c + 1
        p0, p1 = divmod(j, 2)
        want = [piece.table[p0][x] if x < cut else piece.table[p1][x] + 2 for x in range(6)]
        assert list(S.row(i)) == want


def test_stitched_splitter_verifies():
    H = build_splitter(12, 8, 4, z=2)
    assert isinstance(H, Stitched)
    assert verify_splitter(H, 8, 4)
    assert (H.row(17) == H.row(17)).all()


def test_unrank_combination():
    for N in range(1, 7):
        for t in range(0, N + 1):
            assert [unrank_combination(N, t, i) for i in range(math.comb(N, t))] == \
                [list(c) for c in combinations(range(N), t)]


@pytest.mark.parametrize("e", [6, 8, 10, 12])
def test_z_monotone(e):
    r = 2**e
    rep = appendixA_report(r, r)
    assert rep["ll1"]["strictly_decreasing"]
    assert len(rep["ll1"]["samples"]) == 32


def test_z_endpoints():
    r = 2**10
    assert math.isclose(z_value(r, r), 80.0, rel_tol=1e-12)
    for e in (6, 8, 10, 12):
        r = 2**e
        assert math.isclose(z_value(r, r), float(oracles.z(r, r)), rel_tol=1e-12)
        assert math.isclose(z_value(r, r), 8 * e, rel_tol=1e-12)
        # at k = sqrt(r) the value is 16 sqrt(r) log r / (log r + 4), below 16 sqrt(r)
        zs = z_value(r, math.sqrt(r))
        assert math.isclose(zs, 16 * math.sqrt(r) * e / (e + 4), rel_tol=1e-12)
        assert zs < 16 * math.sqrt(r)


def test_appendix_ratios():
    rep = appendixA_report(2**12, 2**10)
    assert rep["ll2"]["log2_ratio"] < 0
    assert rep["ll4"]["ratio"] > 0
    assert np.isfinite(rep["ll3"]["exponent"])
