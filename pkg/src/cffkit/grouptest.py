"""Non-adaptive group testing from (n, (1, s))-cover-free families.

Each row of the family is one pooled test.  With at most s defectives, every
healthy item sits in some test that avoids all defectives, so the items whose
tests all came back positive are exactly the defectives.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List

import numpy as np

from .construct import build_cff
from .core import verify_cff
from .errors import InvalidParams
from .family import BitFamily


@dataclass(frozen=True)
class PoolingDesign:
    n: int
    s: int
    tests: BitFamily
    provenance: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.s + 1

    @property
    def num_tests(self) -> int:
        return self.tests.size

    @property
    def matrix(self) -> np.ndarray:
        return self.tests.table


def design_tests(n: int, s: int, allow_identity: bool = True) -> PoolingDesign:
    """Pools from ``build_cff(n, 1, s)``.

    Repeated and empty pools carry no information and are dropped.  When the
    identity design (one item per test) is smaller, it is used instead unless
    ``allow_identity`` is False.
    """
    if not 1 <= s < n:
        raise InvalidParams(f"need 1 <= s < n, got s={s}, n={n}")
    fam, report = build_cff(n, 1, s)
    rows = fam.distinct_rows()
    rows = rows[rows.any(axis=1)]
    prov = {"d": s + 1, "source": "cff", "regime": report.regime,
            "family_size": fam.size, "distinct_nonzero_rows": int(rows.shape[0])}
    if allow_identity and n <= rows.shape[0]:
        rows = np.eye(n, dtype=np.int32)
        prov["source"] = "identity"
    return PoolingDesign(n, s, BitFamily(rows, n), prov)


def _defect_matrix(n: int, sets: Iterable[Iterable[int]]) -> np.ndarray:
    sets = list(sets)
    D = np.zeros((len(sets), n), dtype=np.float32)
    for i, T in enumerate(sets):
        T = list(T)
        if T and (min(T) < 0 or max(T) >= n):
            raise InvalidParams("defective index out of range")
        D[i, T] = 1
    return D


def simulate_many(design: PoolingDesign, defect_matrix: np.ndarray) -> np.ndarray:
    """Outcomes for a batch of 0/1 defect indicator rows (B x n) -> (B x N)."""
    A = design.matrix.astype(np.float32)
    return (np.asarray(defect_matrix, dtype=np.float32) @ A.T > 0).astype(np.int8)


def simulate(design: PoolingDesign, defectives: Iterable[int]) -> np.ndarray:
    """outcome_t = 1 iff pool t meets the defective set."""
    return simulate_many(design, _defect_matrix(design.n, [defectives]))[0]


def decode_many(design: PoolingDesign, outcomes: np.ndarray) -> np.ndarray:
    """Items (B x n boolean) all of whose tests are positive."""
    out = np.asarray(outcomes)
    if out.ndim != 2 or out.shape[1] != design.num_tests:
        raise InvalidParams(f"outcomes must have {design.num_tests} columns")
    neg = (1 - out).astype(np.float32)
    return (neg @ design.matrix.astype(np.float32)) == 0


def decode(design: PoolingDesign, outcomes) -> List[int]:
    """Sorted items whose every test is positive."""
    o = np.asarray(outcomes).reshape(1, -1)
    if o.shape[1] != design.num_tests:
        raise InvalidParams(f"expected {design.num_tests} outcomes, got {o.shape[1]}")
    return [int(i) for i in np.nonzero(decode_many(design, o)[0])[0]]


def round_trip(design: PoolingDesign, sets: List[List[int]], chunk: int = 4096) -> List[List[int]]:
    """Defective sets (from ``sets``) that do not decode back to themselves."""
    failures = []
    for a in range(0, len(sets), chunk):
        block = sets[a:a + chunk]
        D = _defect_matrix(design.n, block)
        got = decode_many(design, simulate_many(design, D))
        bad = np.nonzero((got != (D > 0)).any(axis=1))[0]
        failures.extend(block[i] for i in bad)
    return failures


def check_design(design: PoolingDesign):
    return verify_cff(design.tests, 1, design.s)
