"""Seeded random CFF sampler used as an independent sanity oracle.

Rows are i.i.d. with each bit 1 with probability r/d.  Rows are added until
every (d-subset, weight-r pattern) pair is realized, which is the union-bound
argument run to completion instead of bounded in expectation.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .core import subset_chunks, weight_masks
from .errors import CapacityError, InvalidParams
from .family import BitFamily


def union_bound_rows(n: int, r: int, s: int, p: Optional[float] = None) -> int:
    """Rows after which a random family fails with probability below 1/2."""
    d = r + s
    p = r / d if p is None else p
    miss = 1 - p**r * (1 - p) ** s
    pairs = math.comb(n, d) * math.comb(d, r)
    return math.ceil(math.log(2 * pairs) / -math.log(miss))


def sample_union_bound_cff(n: int, r: int, s: int, seed: int = 0,
                           p: Optional[float] = None, max_rows: int = 1_000_000) -> BitFamily:
    """Sample rows until the family is an (n, (r, s))-CFF."""
    d = r + s
    if r < 1 or s < 1 or d > n:
        raise InvalidParams("need r, s >= 1 and r + s <= n")
    p = r / d if p is None else p
    rng = np.random.default_rng(seed)
    subs = np.vstack(list(subset_chunks(n, d, 1 << 20)))
    _, masks = weight_masks(d, r)
    shifts = np.int64(1) << np.arange(d, dtype=np.int64)
    need = np.zeros((subs.shape[0], 1 << d), dtype=bool)
    need[:, masks] = True
    rows = []
    batch = 64
    while need.any():
        if len(rows) >= max_rows:
            raise CapacityError(f"no CFF within {max_rows} sampled rows")
        R = (rng.random((batch, n)) < p).astype(np.int64)
        codes = (R[:, subs] * shifts).sum(-1)  # batch x B
        for row, c in zip(R, codes):
            hit = need[np.arange(len(c)), c]
            if hit.any():
                need[np.arange(len(c)), c] = False
                rows.append(row)
                if not need.any():
                    break
    return BitFamily(np.array(rows), n, kind="random-oracle")
