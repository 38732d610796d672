"""Families of functions ``[n] -> [q]``, materialized or lazy.

Every family knows its exact cardinality (duplicates counted) and can

* evaluate member ``i`` (``row(i)``),
* materialize all members when under the member cap (``to_array()``),
* list the distinct restrictions of its members to a set of columns
  (``patterns(cols)``).

The last one is what the exhaustive verifiers consume: every property checked
in this package (cover-free, perfect hashing, splitting, separation) depends
only on the *set* of distinct rows, so verifying the distinct restrictions is
equivalent to verifying the full multiset of members.  Lazy families compute
their patterns from the construction structure without enumerating members.

Points and values are 0-based throughout the library; file formats and
printed witnesses are 1-based.
"""
from __future__ import annotations

import json
import math
import os
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .errors import CapacityError, InvalidParams

DEFAULT_MAX_MEMBERS = 2**24


def max_members() -> int:
    """Materialization cap (number of members); env ``CFFKIT_MAX_MEMBERS``."""
    return int(os.environ.get("CFFKIT_MAX_MEMBERS", DEFAULT_MAX_MEMBERS))


def check_capacity(count: int, what: str, cap: Optional[int] = None) -> None:
    cap = max_members() if cap is None else cap
    if count > cap:
        raise CapacityError(f"{what}: {count} exceeds the materialization cap {cap}")


def unique_rows(a: np.ndarray, q: int) -> np.ndarray:
    """Distinct rows of an integer matrix with entries in [0, q), sorted."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError("expected a 2-d array")
    if a.shape[0] == 0:
        return a.reshape(0, a.shape[1]).astype(np.int32)
    if a.shape[1] == 0:
        return np.zeros((1, 0), dtype=np.int32)
    width = a.shape[1]
    if width * math.log2(max(q, 2)) <= 62:
        w = np.int64(max(q, 2)) ** np.arange(width - 1, -1, -1, dtype=np.int64)
        codes = np.unique(a.astype(np.int64) @ w)
        return ((codes[:, None] // w) % max(q, 2)).astype(np.int32)
    return np.unique(a.astype(np.int32), axis=0)


def product_patterns(width: int, parts, q: int) -> np.ndarray:
    """Cartesian product of pattern sets living on disjoint positions.

    ``parts`` is a sequence of ``(positions, patterns)`` pairs.  Positions not
    covered by any part are left at 0.
    """
    out = np.zeros((1, width), dtype=np.int32)
    for pos, pats in parts:
        pos = np.asarray(pos, dtype=np.int64)
        if len(pos) == 0:
            if pats.shape[0] == 0:
                return np.zeros((0, width), dtype=np.int32)
            continue
        a, b = out.shape[0], pats.shape[0]
        new = np.repeat(out, b, axis=0)
        new[:, pos] = np.tile(pats, (a, 1))
        out = new
    return out


def tree_size(tree: dict) -> int:
    """Recompute a construction tree's cardinality from its leaves."""
    children = tree.get("children") or []
    if not children:
        return int(tree["size"])
    combine = tree.get("combine", "product")
    sizes = [tree_size(c) for c in children]
    if combine == "sum":
        return sum(sizes)
    total = 1
    for s in sizes:
        total *= s
    return total


def leaf(kind: str, size: int, **params) -> dict:
    return {"kind": kind, "size": int(size), "params": params}


class FnFamily:
    """A family of functions ``[n] -> [q]`` with exact cardinality ``size``."""

    kind = "family"

    def __init__(self, n: int, q: int, size: int):
        self.n = int(n)
        self.q = int(q)
        self.size = int(size)
        self.descriptor: Optional[dict] = None

    # -- evaluation -----------------------------------------------------
    def row(self, i: int) -> np.ndarray:
        raise NotImplementedError

    def value(self, i: int, x: int) -> int:
        return int(self.row(i)[x])

    def _index(self, i: int) -> int:
        i = int(i)
        if not 0 <= i < self.size:
            raise IndexError(f"member index {i} out of range for size {self.size}")
        return i

    def to_array(self) -> np.ndarray:
        check_capacity(self.size, f"materializing {self.kind}")
        return self._to_array()

    def _to_array(self) -> np.ndarray:
        if self.size == 0:
            return np.zeros((0, self.n), dtype=np.int32)
        return np.stack([self.row(i) for i in range(self.size)]).astype(np.int32)

    def patterns(self, cols) -> np.ndarray:
        """Distinct restrictions of members to ``cols`` (distinct columns)."""
        cols = np.asarray(cols, dtype=np.int64)
        return self._patterns(cols)

    def _patterns(self, cols: np.ndarray) -> np.ndarray:
        return unique_rows(self.to_array()[:, cols], self.q)

    def distinct_rows(self) -> np.ndarray:
        return self.patterns(np.arange(self.n))

    @property
    def is_bit(self) -> bool:
        return self.q == 2

    def tree(self) -> dict:
        return leaf(self.kind, self.size, n=self.n, q=self.q)

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        for i in range(self.size):
            yield self.row(i)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} kind={self.kind} n={self.n} q={self.q} N={self.size}>"


class Table(FnFamily):
    """A materialized family: an ``N x n`` integer matrix of values."""

    kind = "table"

    def __init__(self, table, q: int, kind: Optional[str] = None):
        t = np.array(table, dtype=np.int32)
        if t.ndim == 1:
            t = t.reshape(1, -1)
        if t.ndim != 2:
            raise InvalidParams("table must be two-dimensional")
        if t.size and (t.min() < 0 or t.max() >= q):
            raise InvalidParams(f"table values must lie in [0, {q})")
        t.setflags(write=False)
        super().__init__(t.shape[1], q, t.shape[0])
        self.table = t
        if kind:
            self.kind = kind

    def row(self, i):
        return self.table[self._index(i)].copy()

    def to_array(self):
        return self.table

    def _patterns(self, cols):
        return unique_rows(self.table[:, cols], self.q)

    def tree(self):
        return leaf(self.kind, self.size, n=self.n, q=self.q, materialized=True)


class BitFamily(Table):
    """An explicit family of n-bit vectors (rows of an incidence matrix)."""

    kind = "bits"

    def __init__(self, rows, n: Optional[int] = None, kind: Optional[str] = None):
        rows = list(rows) if not isinstance(rows, np.ndarray) else rows
        if len(rows) and isinstance(rows[0], str):
            if any(len(r) != len(rows[0]) for r in rows):
                raise InvalidParams("rows must all have n bits")
            rows = [[int(c) for c in r] for r in rows]
        arr = np.array(rows, dtype=np.int32)
        if arr.size == 0:
            if n is None:
                raise InvalidParams("an empty family needs an explicit n")
            arr = np.zeros((0, n), dtype=np.int32)
        if n is not None and arr.shape[1] != n:
            raise InvalidParams(f"rows have {arr.shape[1]} bits, expected {n}")
        super().__init__(arr, 2, kind)

    @classmethod
    def from_family(cls, fam: FnFamily) -> "BitFamily":
        if fam.q != 2:
            raise InvalidParams("not a binary family")
        return cls(fam.to_array(), fam.n)

    def strings(self) -> List[str]:
        return ["".join(map(str, r)) for r in self.table]


class Identity(FnFamily):
    """The single embedding ``x -> x`` of [n] into [q]."""

    kind = "identity"

    def __init__(self, n: int, q: int):
        if n > q:
            raise InvalidParams("identity embedding needs n <= q")
        super().__init__(n, q, 1)

    def row(self, i):
        self._index(i)
        return np.arange(self.n, dtype=np.int32)

    def _patterns(self, cols):
        return cols.astype(np.int32).reshape(1, -1)


class Constant(FnFamily):
    kind = "constant"

    def __init__(self, n: int, q: int, value: int = 0):
        if not 0 <= value < q:
            raise InvalidParams("constant value out of range")
        super().__init__(n, q, 1)
        self.c = value

    def row(self, i):
        self._index(i)
        return np.full(self.n, self.c, dtype=np.int32)

    def _patterns(self, cols):
        return np.full((1, len(cols)), self.c, dtype=np.int32)

    def tree(self):
        return leaf(self.kind, 1, n=self.n, q=self.q, value=self.c)


class Complement(FnFamily):
    """Row-wise bitwise complement of a binary family."""

    kind = "complement"

    def __init__(self, base: FnFamily):
        if base.q != 2:
            raise InvalidParams("complement needs a binary family")
        super().__init__(base.n, 2, base.size)
        self.base = base

    def row(self, i):
        return 1 - self.base.row(i)

    def _to_array(self):
        return (1 - self.base.to_array()).astype(np.int32)

    def _patterns(self, cols):
        return unique_rows(1 - self.base.patterns(cols), 2)

    def tree(self):
        return {"kind": self.kind, "size": self.size, "params": {},
                "combine": "product", "children": [self.base.tree()]}


class Restrict(FnFamily):
    """Keeps the first m columns of every member."""

    kind = "restrict"

    def __init__(self, base: FnFamily, m: int):
        super().__init__(m, base.q, base.size)
        self.base = base

    def row(self, i):
        return self.base.row(i)[: self.n]

    def _to_array(self):
        return self.base.to_array()[:, : self.n]

    def _patterns(self, cols):
        return self.base.patterns(cols)

    def tree(self):
        return {"kind": self.kind, "size": self.size, "params": {"m": self.n},
                "combine": "product", "children": [self.base.tree()]}


class Union(FnFamily):
    """Concatenation of families on the same domain; members keep their tags."""

    kind = "union"

    def __init__(self, parts: Sequence[FnFamily], tags: Optional[Sequence[str]] = None):
        if not parts:
            raise InvalidParams("union of nothing")
        n, q = parts[0].n, parts[0].q
        if any(p.n != n or p.q != q for p in parts):
            raise InvalidParams("union parts must share domain and range")
        super().__init__(n, q, sum(p.size for p in parts))
        self.parts = list(parts)
        self.tags = list(tags) if tags else [str(i) for i in range(len(parts))]

    def locate(self, i: int):
        """``(tag, part, index within part)`` for member i."""
        i = self._index(i)
        for tag, p in zip(self.tags, self.parts):
            if i < p.size:
                return tag, p, i
            i -= p.size
        raise AssertionError  # pragma: no cover

    def row(self, i):
        _, p, j = self.locate(i)
        return p.row(j)

    def _to_array(self):
        return np.vstack([p.to_array() for p in self.parts]).astype(np.int32)

    def _patterns(self, cols):
        return unique_rows(np.vstack([p.patterns(cols) for p in self.parts]), self.q)

    def tree(self):
        return {"kind": self.kind, "size": self.size, "params": {"tags": self.tags},
                "combine": "sum", "children": [p.tree() for p in self.parts]}


class Composed(FnFamily):
    """All compositions ``inner_j o outer_i``; member index ``i * |inner| + j``."""

    kind = "composed"

    def __init__(self, outer: FnFamily, inner: FnFamily):
        if outer.q != inner.n:
            raise InvalidParams(
                f"outer range {outer.q} does not match inner domain {inner.n}")
        super().__init__(outer.n, inner.q, outer.size * inner.size)
        self.outer = outer
        self.inner = inner

    def row(self, i):
        i = self._index(i)
        o, j = divmod(i, self.inner.size)
        return self.inner.row(j)[self.outer.row(o)]

    def _to_array(self):
        outer = self.outer.to_array()
        inner = self.inner.to_array()
        # inner[:, outer] has shape (|inner|, |outer|, n)
        out = inner[:, outer].transpose(1, 0, 2).reshape(-1, self.n)
        return out.astype(np.int32)

    def _patterns(self, cols):
        found = []
        for u in self.outer.patterns(cols):
            vals, inv = np.unique(u, return_inverse=True)
            found.append(self.inner.patterns(vals)[:, inv.reshape(-1)])
        return unique_rows(np.vstack(found), self.q)

    def tree(self):
        return {"kind": self.kind, "size": self.size, "params": {},
                "combine": "product",
                "children": [self.outer.tree(), self.inner.tree()]}


class ProductBlocks(FnFamily):
    """Tuples of members, one per block, read as a function on ``[k] x [m]``.

    Point ``(j, x)`` is flattened to ``j * m + x``.  Member index is mixed
    radix with the first block most significant.
    """

    kind = "product-blocks"

    def __init__(self, parts: Sequence[FnFamily]):
        m, q = parts[0].n, parts[0].q
        if any(p.n != m or p.q != q for p in parts):
            raise InvalidParams("block families must share domain and range")
        size = 1
        for p in parts:
            size *= p.size
        super().__init__(len(parts) * m, q, size)
        self.parts = list(parts)
        self.m = m
        self.k = len(parts)

    def split_index(self, i: int) -> List[int]:
        i = self._index(i)
        idx = []
        for p in reversed(self.parts):
            i, r = divmod(i, p.size)
            idx.append(r)
        return idx[::-1]

    def row(self, i):
        return np.concatenate([p.row(j) for p, j in zip(self.parts, self.split_index(i))])

    def _to_array(self):
        arrs = [p.to_array() for p in self.parts]
        parts = [(np.arange(j * self.m, (j + 1) * self.m), a) for j, a in enumerate(arrs)]
        return product_patterns(self.n, parts, self.q)

    def _patterns(self, cols):
        blocks = cols // self.m
        parts = []
        for j, p in enumerate(self.parts):
            pos = np.nonzero(blocks == j)[0]
            if len(pos):
                parts.append((pos, p.patterns(cols[pos] % self.m)))
        return product_patterns(len(cols), parts, self.q)

    def tree(self):
        return {"kind": self.kind, "size": self.size, "params": {"k": self.k},
                "combine": "product", "children": [p.tree() for p in self.parts]}


# -- builder registry and descriptors ---------------------------------------

_BUILDERS: Dict[str, Callable] = {}


def builder(name: str):
    """Register a deterministic builder so lazy families can be re-instantiated."""

    def wrap(fn):
        import inspect

        sig = inspect.signature(fn)

        def inner(*args, **kwargs):
            fam = fn(*args, **kwargs)
            target = fam[0] if isinstance(fam, tuple) else fam
            if isinstance(target, FnFamily) and target.descriptor is None:
                bound = sig.bind(*args, **kwargs)
                bound.apply_defaults()
                target.descriptor = {
                    "builder": name,
                    "args": {k: _jsonable(v) for k, v in bound.arguments.items()},
                }
            return fam

        inner.__name__ = fn.__name__
        inner.__doc__ = fn.__doc__
        inner.__wrapped__ = fn
        _BUILDERS[name] = inner
        return inner

    return wrap


def _jsonable(v):
    from fractions import Fraction

    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def from_descriptor(desc: dict) -> FnFamily:
    name = desc["builder"]
    if name not in _BUILDERS:
        # builders register on import
        from . import construct, hashing, separators, splitters  # noqa: F401
    fn = _BUILDERS.get(name)
    if fn is None:
        raise InvalidParams(f"unknown builder {name!r}")
    fam = fn(**desc["args"])
    return fam[0] if isinstance(fam, tuple) else fam


# -- FnFamily file format ------------------------------------------------------

def write_fn_family(fam: FnFamily, stream, materialize: Optional[bool] = None) -> None:
    """``FNF n=<n> q=<q> N=<N> kind=<tag>`` then rows (1-based) or a descriptor."""
    if materialize is None:
        materialize = fam.size <= max_members() or fam.descriptor is None
    stream.write(f"FNF n={fam.n} q={fam.q} N={fam.size} kind={fam.kind}\n")
    if materialize:
        for r in fam.to_array():
            stream.write(" ".join(str(int(v) + 1) for v in r) + "\n")
    else:
        if fam.descriptor is None:
            raise InvalidParams("lazy family has no descriptor to serialize")
        stream.write("descriptor " + json.dumps(fam.descriptor, sort_keys=True) + "\n")


def parse_header(line: str, tag: str) -> Dict[str, str]:
    parts = line.split()
    if not parts or parts[0] != tag:
        raise InvalidParams(f"expected a {tag} header, got {line.strip()!r}")
    out = {}
    for p in parts[1:]:
        k, _, v = p.partition("=")
        out[k] = v
    return out


def read_fn_family(stream) -> FnFamily:
    lines = stream.read().splitlines()
    h = parse_header(lines[0], "FNF")
    n, q, N = int(h["n"]), int(h["q"]), int(h["N"])
    body = lines[1:]
    if body and body[0].startswith("descriptor "):
        fam = from_descriptor(json.loads(body[0][len("descriptor "):]))
        if (fam.n, fam.q, fam.size) != (n, q, N):
            raise InvalidParams("descriptor does not reproduce the header parameters")
        return fam
    if len(body) != N:
        raise InvalidParams(f"header says N={N} but file has {len(body)} rows")
    rows = [[int(v) - 1 for v in line.split()] for line in body]
    if any(len(r) != n for r in rows):
        raise InvalidParams("row length does not match n")
    return Table(np.array(rows).reshape(N, n), q, kind=h.get("kind"))


def iter_chunks(total: int, chunk: int) -> Iterable[slice]:
    for a in range(0, total, chunk):
        yield slice(a, min(total, a + chunk))
