"""Acceptance suite: one check per criterion, one PASS/FAIL line each.

Run under pytest (lines appear in the "acceptance criteria" summary section)
or directly with ``python tests/test_acceptance.py``.
"""
import math
import os
import sys
import time
from decimal import Decimal
from itertools import combinations

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from cffkit import (BitFamily, appendixA_report, build_cff, build_cff_construction1,  # noqa: E402
                    build_cff_construction2, build_mcff, build_min_separating, build_phf,
                    build_splitter, build_splitter_base, compose_families, design_tests,
                    lift_to_multiset_separator, round_trip, tree_size, verify_cff, verify_mcff,
                    verify_min_separating, verify_splitter)
from cffkit.construct import binary_entropy, n_rs  # noqa: E402
from cffkit.fields import smallest_prime_power_above  # noqa: E402
from cffkit.hashing import build_dense_shf, shf_min_density  # noqa: E402
from cffkit.oracle import sample_union_bound_cff  # noqa: E402
from cffkit.splitters import z_value  # noqa: E402

import oracles  # noqa: E402

try:
    from conftest import ACCEPTANCE
except ImportError:  # pragma: no cover - script mode without conftest on the path
    ACCEPTANCE = []


def accounted(fam):
    return tree_size(fam.tree()) == fam.size == fam.to_array().shape[0]


# -- criteria ------------------------------------------------------------------
# each returns (ok, detail)

def c01_cff_grid():
    t0 = time.time()
    count, bad = 0, []
    for n in (8, 10, 12, 14):
        for d in range(2, 7):
            for r in range(1, d // 2 + 1):
                F, _ = build_cff(n, r, d - r)
                count += 1
                if not verify_cff(F, r, d - r):
                    bad.append((n, r, d - r))
    dt = time.time() - t0
    return not bad and dt < 600, f"{count} builds verified, failures={bad}, {dt:.1f}s (< 600s)"


def c02_pipeline_isolation():
    bad, identical = [], True
    for s in (2, 4):
        for k in (1, 2):
            a = build_cff_construction1(12, 2, s, k)
            b = build_cff_construction2(12, 2, s, k)
            for name, F in (("I", a), ("II", b)):
                if not verify_cff(F, 2, s):
                    bad.append((name, s, k))
            if k == 1:
                identical &= a.size == b.size and bool((a.to_array() == b.to_array()).all())
    return not bad and identical, f"failures={bad}, k=1 member-identical={identical}"


def _pairing(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 4))
    r = int(rng.integers(1, d // 2 + 1))
    q = smallest_prime_power_above(4 * (math.comb(d, 2) + 1))
    n = q + int(rng.integers(1, 7))
    H = build_phf(n, q, d)
    base = sample_union_bound_cff(q, r, d - r, seed=seed)
    inner = BitFamily(base.table[rng.permutation(base.size)], q)
    return rng, H, inner, r, d - r


def c03_composition_soundness():
    sound, corrupt_ok, notes = 0, 0, []
    for seed in range(20):
        rng, H, inner, r, s = _pairing(seed)
        good = compose_families(H, inner)
        if verify_cff(good, r, s):
            sound += 1
        # search for an inner row the composition cannot do without
        arr = inner.to_array()
        for j in rng.permutation(arr.shape[0]):
            kept = arr[~(arr == arr[j]).all(axis=1)]
            bad = compose_families(H, BitFamily(kept, inner.n))
            v = verify_cff(bad, r, s)
            if not v:
                if v.witness.replay(bad) and not v.witness.replay(good):
                    corrupt_ok += 1
                else:
                    notes.append(seed)
                break
        else:
            notes.append(seed)
    return sound == 20 and corrupt_ok == 20, \
        f"{sound}/20 pairings verified, {corrupt_ok}/20 corruptions caught with replayable " \
        f"witnesses, problems={notes}"


def c04_splitters():
    count, bad = 0, []
    for n in range(1, 17):
        for r in range(1, min(4, n) + 1):
            for k in (x for x in range(1, r + 1) if r % x == 0):
                H = build_splitter(n, r, k)
                count += 1
                if not verify_splitter(H, r, k):
                    bad.append((n, r, k))
    B = build_splitter_base(4, 2, 2)
    small = B.size <= 2 and bool(verify_splitter(B, 2, 2))
    return not bad and small, f"{count} splitters verified, failures={bad}, " \
        f"(4,2,2) base size={B.size} (target 2)"


def c05_z_numerics():
    ok, parts = True, []
    for e in (6, 8, 10, 12):
        r = 2**e
        rep = appendixA_report(r, r)["ll1"]
        dec = rep["strictly_decreasing"] and len(rep["samples"]) == 32
        zr = z_value(r, r)
        end_r = abs(zr - 8 * e) / (8 * e) < 1e-9
        zs = z_value(r, math.sqrt(r))
        end_s = abs(zs - 16 * math.sqrt(r)) / (16 * math.sqrt(r)) < 1e-9
        ok &= dec and end_r and end_s
        parts.append(f"r=2^{e}: decreasing={dec} z(r,r)={zr:.6g} vs {8 * e} "
                     f"z(r,sqrt r)={zs:.6g} vs {16 * math.sqrt(r):.6g}")
    return ok, "; ".join(parts)


def c06_mcff():
    count, bad, low = 0, [], []
    specs = [((1, 1),), ((1, 2),), ((1, 1), (1, 1)), ((1, 2), (1, 2)), ((1, 1), (1, 2))]
    for n in range(2, 11):
        for spec in specs:
            if max(a + b for a, b in spec) > n:
                continue
            M = build_mcff(n, spec)
            count += 1
            if not verify_mcff(M, spec):
                bad.append((n, spec))
            for (a, b), h in zip(M.spec.pairs, M.shfs):
                if shf_min_density(h, a, b) < 0.5:
                    low.append((n, spec))
    for n, q, a, b in ((60, 25, 1, 1), (200, 25, 1, 1), (70, 49, 1, 2)):
        if shf_min_density(build_dense_shf(n, q, a, b, "1/2"), a, b) < 0.5:
            low.append((n, q, a, b))
    return not bad and not low, f"{count} MCFF builds verified, failures={bad}, " \
        f"density below 1/2: {low}"


def c07_group_testing():
    t0 = time.time()
    n, s = 500, 2
    sets = [list(c) for j in range(s + 1) for c in combinations(range(n), j)]
    parts, ok = [], len(sets) == 125251
    for allow in (True, False):
        D = design_tests(n, s, allow_identity=allow)
        fails = round_trip(D, sets)
        ok &= not fails
        parts.append(f"{D.provenance['source']} design: {D.num_tests} tests, {len(fails)} failures")
    dt = time.time() - t0
    ok &= dt < 300
    return ok, f"{len(sets)} defective sets of size <= 2 (1 + 500 + C(500,2)); " \
        + "; ".join(parts) + f"; {dt:.1f}s (< 300s)"


def c08_separators():
    count, bad = 0, []
    for n in range(1, 11):
        for t in range(0, 3):
            for k in range(t, 5):
                if k > n or k == 0:
                    continue
                H = build_min_separating(n, t, k)
                count += 1
                if not verify_min_separating(H, t, k):
                    bad.append((n, t, k))
    H = build_min_separating(3, 2, 2)
    M = lift_to_multiset_separator(H, 2, 2)
    card = len(M) == H.size * 3**2
    return not bad and M.verified and card, \
        f"{count} separating families verified, failures={bad}; lift |F|={len(M)} " \
        f"= {H.size}*3^2: {card}, verified={M.verified}"


def c09_size_accounting():
    fams = []
    for n in (8, 12):
        for d in range(2, 7):
            for r in range(1, d // 2 + 1):
                fams.append(build_cff(n, r, d - r).family)
    for k in (1, 2):
        fams += [build_cff_construction1(12, 2, 4, k), build_cff_construction2(12, 2, 4, k)]
    fams += [build_mcff(8, ((1, 1), (1, 2))), build_min_separating(7, 2, 3),
             build_splitter(12, 4, 2), build_cff(8, 3, 1).family]
    bad = [f.kind for f in fams if not accounted(f)]
    worst = 0.0
    for r in range(1, 21):
        for s in range(1, 21):
            exact = oracles.n_rs(r, s)
            worst = max(worst, float(abs(Decimal(n_rs(r, s)) - exact) / exact))
            h = oracles.h2(Decimal(r) / Decimal(r + s))
            worst = max(worst, float(abs(Decimal(binary_entropy(r / (r + s))) - h) / h))
    return not bad and worst < 1e-12, \
        f"{len(fams)} builds with |F| = tree product = rows (mismatches={bad}); " \
        f"worst relative error N(r,s)/H2 = {worst:.2e} (< 1e-12)"


def c10_oracle_sanity():
    F, _ = build_cff(12, 2, 2)
    R = sample_union_bound_cff(12, 2, 2, seed=0)
    both = bool(verify_cff(F, 2, 2)) and bool(verify_cff(R, 2, 2))
    within = R.size <= 10 * F.size
    truncated = BitFamily(F.distinct_rows()[:3], 12)
    rejects = not verify_cff(truncated, 2, 2)
    return both and within and rejects, \
        f"sampler {R.size} rows vs constructed {F.size}; both verified={both}; " \
        f"truncated family rejected={rejects}"


CRITERIA = [
    ("CFF grid", c01_cff_grid),
    ("pipeline isolation", c02_pipeline_isolation),
    ("composition soundness", c03_composition_soundness),
    ("splitter suite", c04_splitters),
    ("z(r,k) numerics", c05_z_numerics),
    ("MCFF suite", c06_mcff),
    ("group testing", c07_group_testing),
    ("separators", c08_separators),
    ("size accounting", c09_size_accounting),
    ("oracle sanity", c10_oracle_sanity),
]


def run_criterion(i, name, fn):
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] {i:2d} {name}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok, line


@pytest.mark.parametrize("i,name,fn", [(i + 1, n, f) for i, (n, f) in enumerate(CRITERIA)],
                         ids=[n.replace(" ", "-") for n, _ in CRITERIA])
def test_criterion(i, name, fn):
    ok, line = run_criterion(i, name, fn)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(i + 1, n, f)[0] for i, (n, f) in enumerate(CRITERIA)]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
