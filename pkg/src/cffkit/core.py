"""Design parameters, witnesses, and the exhaustive cover-free verifier."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations, islice
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .errors import InvalidParams
from .family import BitFamily, Complement, FnFamily, Restrict, parse_header


@dataclass(frozen=True)
class DesignParams:
    """``(n, r, s)`` plus optional overrides for the construction knobs."""

    n: int
    r: int
    s: int
    k: Optional[int] = None
    q: Optional[int] = None
    phi: Optional[int] = None

    def __post_init__(self):
        if self.r < 1 or self.s < 1:
            raise InvalidParams(f"need r >= 1 and s >= 1, got r={self.r}, s={self.s}")
        if self.r + self.s > self.n:
            raise InvalidParams(f"d = r + s = {self.r + self.s} exceeds n = {self.n}")

    @property
    def d(self) -> int:
        return self.r + self.s

    @property
    def swapped(self) -> bool:
        return self.r > self.s

    def normalized(self) -> "DesignParams":
        if self.r <= self.s:
            return self
        return replace(self, r=self.s, s=self.r)


_REPLAYERS: Dict[str, Callable] = {}


def register_replay(kind: str):
    def wrap(fn):
        _REPLAYERS[kind] = fn
        return fn
    return wrap


@dataclass(frozen=True)
class Witness:
    """A counterexample certificate.

    ``index_set`` holds sorted 0-based points; ``pattern`` is kind specific
    (positions within ``index_set`` that should be 1 for ``cff``, the second
    set for pair-shaped kinds, and so on).  ``params`` carries whatever the
    replay needs.
    """

    kind: str
    index_set: Tuple[int, ...]
    pattern: Tuple = ()
    params: Dict = field(default_factory=dict, compare=False)

    def replay(self, obj) -> bool:
        """True iff ``obj`` still fails on this witness."""
        if self.kind not in _REPLAYERS:
            from . import construct, hashing, rectangles, separators, splitters  # noqa: F401
        return _REPLAYERS[self.kind](self, obj)

    def describe(self) -> str:
        cols = " ".join(str(i + 1) for i in self.index_set)
        if self.kind == "cff":
            d = len(self.index_set)
            bits = "".join("1" if j in self.pattern else "0" for j in range(d))
            return f"cff: columns [{cols}] pattern {bits} not realized"
        return f"{self.kind}: points [{cols}] pattern {self.pattern!r}"


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: Optional[Witness] = None

    def __bool__(self):
        return self.ok

    def __iter__(self):
        yield self.ok
        yield self.witness


def subset_chunks(n: int, d: int, chunk: int):
    """Lexicographic d-subsets of range(n) as arrays of at most ``chunk`` rows."""
    it = combinations(range(n), d)
    while True:
        block = list(islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int64).reshape(len(block), d)


def weight_masks(d: int, r: int):
    """Patterns J (as position tuples) and their bit masks, in lexicographic order."""
    js = list(combinations(range(d), r))
    masks = np.array([sum(1 << j for j in J) for J in js], dtype=np.int64)
    return js, masks


def _check_cff_params(n, r, s):
    if r < 1 or s < 1:
        raise InvalidParams(f"need r >= 1 and s >= 1, got r={r}, s={s}")
    if r + s > n:
        raise InvalidParams(f"d = r + s = {r + s} exceeds n = {n}")


def verify_cff(F: FnFamily, r: int, s: int) -> Verdict:
    """Exhaustively check the (n, (r, s)) cover-free property.

    Every d-subset of columns (lexicographic) and every weight-r pattern on it
    must be realized by some row.  The witness is the first failure in that
    order.  Runs over the distinct rows only.
    """
    if F.q != 2:
        raise InvalidParams("verify_cff needs a binary family")
    _check_cff_params(F.n, r, s)
    if F.size == 0:
        raise InvalidParams("empty family")
    d = r + s
    U = F.distinct_rows().astype(np.int64)
    js, masks = weight_masks(d, r)
    shifts = np.int64(1) << np.arange(d, dtype=np.int64)
    width = 1 << d
    chunk = max(1, min(20000, 4_000_000 // max(1, U.shape[0])))
    for subs in subset_chunks(F.n, d, chunk):
        B = subs.shape[0]
        codes = (U[:, subs] * shifts).sum(-1)  # M x B
        present = np.zeros(B * width, dtype=bool)
        present[(codes + np.arange(B, dtype=np.int64) * width).ravel()] = True
        present = present.reshape(B, width)
        missing = ~present[:, masks]
        bad = np.nonzero(missing.any(axis=1))[0]
        if len(bad):
            b = bad[0]
            j = int(np.nonzero(missing[b])[0][0])
            return Verdict(False, Witness("cff", tuple(int(c) for c in subs[b]), js[j],
                                          {"r": r, "s": s}))
    return Verdict(True)


@register_replay("cff")
def _replay_cff(w: Witness, F: FnFamily) -> bool:
    cols = np.array(w.index_set)
    target = np.array([1 if j in w.pattern else 0 for j in range(len(cols))])
    pats = F.patterns(cols)
    return not bool((pats == target).all(axis=1).any())


def complement_family(F: FnFamily) -> FnFamily:
    """Row-wise complement; turns an (n,(r,s))-CFF into an (n,(s,r))-CFF."""
    if isinstance(F, BitFamily):
        return BitFamily(1 - F.table, F.n)
    return Complement(F)


def restrict_columns(F: FnFamily, m: int, d: Optional[int] = None) -> FnFamily:
    """Keep the first m columns.  ``d`` (when given) is the design's r + s."""
    if d is not None and m < d:
        raise InvalidParams(f"cannot restrict to {m} < d = {d} columns")
    if not 1 <= m <= F.n:
        raise InvalidParams(f"m must lie in [1, {F.n}]")
    if m == F.n:
        return F
    if isinstance(F, BitFamily):
        return BitFamily(F.table[:, :m], m)
    return Restrict(F, m)


# -- matrix file format ---------------------------------------------------------

def write_matrix(F: FnFamily, r: int, s: int, stream) -> None:
    """``CFF n=<n> r=<r> s=<s> N=<N>`` followed by N rows over {0,1}."""
    if F.q != 2:
        raise InvalidParams("matrix format holds binary families only")
    arr = F.to_array()
    stream.write(f"CFF n={F.n} r={r} s={s} N={F.size}\n")
    for row in arr:
        stream.write("".join("1" if v else "0" for v in row) + "\n")


def read_matrix(stream):
    """Parse the matrix format; returns ``(family, r, s)``."""
    lines = stream.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    h = parse_header(lines[0], "CFF")
    n, r, s, N = (int(h[k]) for k in ("n", "r", "s", "N"))
    body = lines[1:]
    if len(body) != N:
        raise InvalidParams(f"header says N={N} but file has {len(body)} rows")
    for line in body:
        if len(line) != n or set(line) - {"0", "1"}:
            raise InvalidParams(f"malformed row {line!r}")
    return BitFamily(body, n) if N else BitFamily([], n), r, s
