"""Minimal separating families and multiset separators.

Values are 0-based: a separating family maps [n] into {0, ..., t}, where
0..t-1 play the role of [t] and t is the "outside" value.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Optional

import numpy as np

from .construct import build_cff
from .core import Verdict, Witness, register_replay
from .errors import InvalidParams, VerificationFailed
from .family import (Constant, FnFamily, Table, builder, parse_header, unique_rows)
from .hashing import build_perfect_hash_compress, build_perfect_hash_quadratic


class SeparatingFamily(FnFamily):
    """``h(x) = f2(f0(x)) if f1(f0(x)) == 1 else t``; index (f0, f1, f2) mixed radix."""

    kind = "min-separating"

    def __init__(self, f0: FnFamily, f1: FnFamily, f2: FnFamily, t: int, k: int):
        if f1.n != f0.q or f2.n != f0.q or f1.q != 2:
            raise InvalidParams("stage families do not fit together")
        super().__init__(f0.n, t + 1, f0.size * f1.size * f2.size)
        self.f0, self.f1, self.f2, self.t, self.k = f0, f1, f2, t, k

    def row(self, i):
        i = self._index(i)
        a, rest = divmod(i, self.f1.size * self.f2.size)
        b, c = divmod(rest, self.f2.size)
        u = self.f0.row(a)
        return np.where(self.f1.row(b)[u] == 1, self.f2.row(c)[u], self.t).astype(np.int32)

    def _to_array(self):
        F0 = self.f0.to_array()
        F1 = self.f1.to_array()
        F2 = self.f2.to_array()
        on = F1[:, F0]  # B x A x n
        val = F2[:, F0]  # C x A x n
        out = np.where(on[None, :, :, :] == 1, val[:, None, :, :], self.t)  # C x B x A x n
        return out.transpose(2, 1, 0, 3).reshape(-1, self.n).astype(np.int32)

    def _patterns(self, cols):
        found = []
        for u in self.f0.patterns(cols):
            v, inv = np.unique(u, return_inverse=True)
            p1 = self.f1.patterns(v)[:, inv.reshape(-1)]
            p2 = self.f2.patterns(v)[:, inv.reshape(-1)]
            found.append(np.where(p1[:, None, :] == 1, p2[None, :, :], self.t)
                         .reshape(-1, len(cols)))
        return unique_rows(np.vstack(found), self.q)

    def tree(self):
        return {"kind": self.kind, "size": self.size, "params": {"t": self.t, "k": self.k},
                "combine": "product",
                "children": [self.f0.tree(), self.f1.tree(), self.f2.tree()]}


@builder("min-separating")
def build_min_separating(n: int, t: int, k: int) -> SeparatingFamily:
    """A (t, k)-minimal separating family on [n] from three stages.

    f0 hashes k-subsets of [n] injectively into [q0]; f1 is a
    (q0, (t, k - t))-CFF that is 1 on C and 0 on D; f2 maps C bijectively
    onto [t].
    """
    if not 0 <= t <= k <= n:
        raise InvalidParams(f"need 0 <= t <= k <= n, got t={t}, k={k}, n={n}")
    f0 = build_perfect_hash_quadratic(n, max(k, 1))
    q0 = f0.q
    if t == 0:
        f1 = Constant(q0, 2, 0)
        f2 = Constant(q0, 1)
    else:
        f1 = Constant(q0, 2, 1) if k == t else build_cff(q0, t, k - t).family
        f2 = build_perfect_hash_compress(q0, t)
    return SeparatingFamily(f0, f1, f2, t, k)


def verify_min_separating(H: FnFamily, t: int, k: int) -> Verdict:
    """Every disjoint (C, D) with |C| = t, |D| <= k - t must be separated.

    Only maximal D are enumerated: a member separating (C, D) also separates
    (C, D') for every D' inside D.
    """
    n = H.n
    if not 0 <= t <= k or t > n:
        raise InvalidParams("need 0 <= t <= k and t <= n")
    if H.q < t + 1:
        raise InvalidParams(f"family range {H.q} is smaller than t + 1")
    U = H.distinct_rows().astype(np.int64)
    outside = U == t
    dsize = min(k - t, n - t)
    target = np.arange(t)
    for C in combinations(range(n), t):
        cmask = (np.sort(U[:, list(C)], axis=1) == target).all(axis=1)
        rest = [x for x in range(n) if x not in C]
        Dl = list(combinations(rest, dsize))
        Ds = np.array(Dl, dtype=np.int64).reshape(len(Dl), dsize)
        good = outside[:, Ds].all(axis=-1) & cmask[:, None]  # M x B
        bad = np.nonzero(~good.any(axis=0))[0]
        if len(bad):
            D = tuple(int(x) for x in Ds[bad[0]])
            return Verdict(False, Witness("min-separating", tuple(sorted(C + D)), (C, D),
                                          {"t": t, "k": k}))
    return Verdict(True)


@register_replay("min-separating")
def _replay_min_sep(w: Witness, H: FnFamily) -> bool:
    C, D = w.pattern
    t = w.params["t"]
    cols = np.array(list(C) + list(D), dtype=np.int64)
    pats = H.patterns(cols)
    ok = (np.sort(pats[:, :len(C)], axis=1) == np.arange(t)).all(axis=1)
    ok &= (pats[:, len(C):] == t).all(axis=1)
    return not bool(ok.any())


def write_separating(H: FnFamily, t: int, k: int, stream) -> None:
    stream.write(f"SEP n={H.n} t={t} k={k} N={H.size}\n")
    for r in H.to_array():
        stream.write(" ".join(str(int(v) + 1) for v in r) + "\n")


def read_separating(stream):
    """Returns ``(family, t, k)``."""
    lines = stream.read().splitlines()
    h = parse_header(lines[0], "SEP")
    n, t, k, N = (int(h[x]) for x in ("n", "t", "k", "N"))
    body = lines[1:]
    if len(body) != N:
        raise InvalidParams(f"header says N={N} but file has {len(body)} rows")
    rows = np.array([[int(v) - 1 for v in line.split()] for line in body]).reshape(N, n)
    return Table(rows, t + 1, kind="min-separating"), t, k


# -- multisets ------------------------------------------------------------------

def complement_multiset(A, r: int) -> np.ndarray:
    A = np.asarray(A)
    if A.size and (A.min() < 0 or A.max() > r):
        raise InvalidParams(f"multiset coordinates must lie in [0, {r}]")
    return r - A


def separates(F, A, B, r: int) -> bool:
    """A <= F <= complement(B), coordinatewise."""
    F, A = np.asarray(F), np.asarray(A)
    return bool((A <= F).all() and (F <= complement_multiset(B, r)).all())


def compatible_pairs(n: int, r: int, k: int):
    """All (A, B) with A + B <= r coordinatewise and |A| + |B| = k, as two arrays."""
    cells = [(a, b) for a in range(r + 1) for b in range(r + 1 - a)]
    As, Bs = [], []
    for combo in product(cells, repeat=n):
        if sum(a + b for a, b in combo) == k:
            As.append([a for a, _ in combo])
            Bs.append([b for _, b in combo])
    return (np.array(As, dtype=np.int64).reshape(-1, n),
            np.array(Bs, dtype=np.int64).reshape(-1, n))


def verify_multiset_separator(F, r: int, k: int) -> Verdict:
    """Every compatible pair (A, B) needs a member F with A <= F <= r - B."""
    F = np.asarray(F, dtype=np.int64)
    if F.ndim != 2:
        raise InvalidParams("expected an N x n array of multisets")
    if F.size and (F.min() < 0 or F.max() > r):
        raise InvalidParams(f"multiset coordinates must lie in [0, {r}]")
    n = F.shape[1]
    A, B = compatible_pairs(n, r, k)
    F = np.unique(F, axis=0)
    chunk = max(1, 2_000_000 // max(1, F.shape[0] * n))
    for a in range(0, A.shape[0], chunk):
        lo, hi = A[a:a + chunk], r - B[a:a + chunk]
        ok = ((F[None] >= lo[:, None]) & (F[None] <= hi[:, None])).all(-1).any(-1)
        bad = np.nonzero(~ok)[0]
        if len(bad):
            i = a + int(bad[0])
            return Verdict(False, Witness("multiset", (),
                                          (tuple(map(int, A[i])), tuple(map(int, B[i]))),
                                          {"r": r, "k": k}))
    return Verdict(True)


@register_replay("multiset")
def _replay_multiset(w: Witness, F) -> bool:
    A, B = w.pattern
    F = np.asarray(F)
    r = w.params["r"]
    return not any(separates(f, A, B, r) for f in F)


@dataclass(frozen=True)
class MultisetFamily:
    rows: np.ndarray
    r: int
    k: int
    default: int
    verified: bool

    def __len__(self):
        return self.rows.shape[0]


def lift_rows(H: FnFamily, t: int, r: int, default: int) -> np.ndarray:
    """F_{h,v}(i) = v[h(i)] for h(i) < t, else ``default``; v ranges over {0..r}^t."""
    hv = H.to_array().astype(np.int64)
    V = np.indices((r + 1,) * t).reshape(t, -1).T if t else np.zeros((1, 0), dtype=np.int64)
    ext = np.concatenate([V, np.full((V.shape[0], 1), default)], axis=1)  # value t -> default
    idx = np.minimum(hv, t)
    return ext[:, idx].transpose(1, 0, 2).reshape(-1, H.n)


def lift_to_multiset_separator(H: FnFamily, r: int, k: int,
                               default: Optional[int] = None) -> MultisetFamily:
    """The (h, v) product family, returned only after exhaustive verification.

    With ``default`` unset, values 0..r are tried in order for points mapped
    outside [t]; the first verifying family is returned.
    """
    if r < 1 or k < 0:
        raise InvalidParams("need r >= 1 and k >= 0")
    t = (2 * k) // r
    if getattr(H, "t", t) != t or H.q != t + 1:
        raise InvalidParams(f"H must be a ({t}, k)-separating family with range t + 1 = {t + 1}")
    last = None
    for dv in ([default] if default is not None else range(r + 1)):
        rows = lift_rows(H, t, r, dv)
        verdict = verify_multiset_separator(rows, r, k)
        if verdict:
            return MultisetFamily(rows, r, k, dv, True)
        last = verdict.witness
    raise VerificationFailed("lifted family is not a multiset separator", last)


def write_multisets(M: MultisetFamily, stream) -> None:
    for row in M.rows:
        stream.write(" ".join(str(int(v)) for v in row) + "\n")
