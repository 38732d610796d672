"""Cover-free family constructions and their size accounting.

Pipeline overview (all families are binary functions on [n]):

* ``build_base_cff``: pick a 1/2-dense separating hash family h:[n]->[q] and
  an r-subset R of [q]; the member is the indicator of h(x) in R.
* ``build_cff_construction1``: hash [n] into [q] with q in (d^3, 2d^3],
  split the r ones evenly with a splitter g into k buckets, guess how many of
  the d points land in each bucket, and put a small CFF on every bucket.
* ``build_cff_construction2``: same skeleton, but each guessed composition is
  served by one multi-CFF instead of a product of per-bucket CFFs.
* ``build_cff``: normalizes r <= s and picks a regime.

Every family reports its construction tree; ``tree_size`` of that tree must
equal the family's size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .core import (DesignParams, Verdict, Witness, complement_family, register_replay,
                   verify_cff)
from .errors import CapacityError, InvalidParams
from .family import (Constant, FnFamily, ProductBlocks, Union, builder, leaf,
                     product_patterns, tree_size, unique_rows)
from .fields import smallest_prime_power_above, smallest_prime_power_in
from .hashing import build_dense_shf, build_phf, compose_families, phf_threshold
from .rectangles import build_hitting_set
from .splitters import build_splitter, splitter_params, unrank_combination

MAX_COMPOSITIONS = 1_000_000


# -- compositions -------------------------------------------------------------

class CompositionList:
    """Lexicographic k-tuples of integers >= lb summing to d."""

    def __init__(self, d: int, k: int, lb: int):
        if k < 1 or lb < 0:
            raise InvalidParams("need k >= 1 and lb >= 0")
        if d < k * lb:
            raise InvalidParams(f"d={d} is smaller than k*lb={k * lb}")
        self.d, self.k, self.lb = d, k, lb

    def __len__(self) -> int:
        return math.comb(self.d - self.k * self.lb + self.k - 1, self.k - 1)

    def __iter__(self) -> Iterator[Tuple[int, ...]]:
        def rec(prefix, left, parts):
            if parts == 1:
                yield prefix + (left,)
                return
            for v in range(self.lb, left - self.lb * (parts - 1) + 1):
                yield from rec(prefix + (v,), left - v, parts - 1)

        yield from rec((), self.d, self.k)


def enumerate_compositions(d: int, k: int, lb: int) -> CompositionList:
    return CompositionList(d, k, lb)


# -- subset-indicator families ----------------------------------------------------

def indicator_patterns(vals: np.ndarray, q: int, rho: int) -> np.ndarray:
    """Distinct bit patterns ``[v in R]`` over all R in C([q], rho).

    Only the intersection T = R & set(vals) matters; T is any subset of the
    distinct values whose size lies in [rho - (q - u), rho] and [0, u].
    """
    uniq, inv = np.unique(vals, return_inverse=True)
    u = len(uniq)
    lo, hi = max(0, rho - (q - u)), min(rho, u)
    if lo > hi:
        return np.zeros((0, len(vals)), dtype=np.int32)
    inv = inv.reshape(-1)
    count = sum(math.comb(u, j) for j in range(lo, hi + 1))
    chosen = np.zeros((count, u), dtype=np.int32)
    i = 0
    for j in range(lo, hi + 1):
        for T in combinations(range(u), j):
            chosen[i, list(T)] = 1
            i += 1
    return chosen[:, inv]


def _subset_masks(q: int, rho: int) -> np.ndarray:
    """Indicator rows of all rho-subsets of [q], lexicographic."""
    out = np.zeros((math.comb(q, rho), q), dtype=np.int32)
    for i, R in enumerate(combinations(range(q), rho)):
        out[i, list(R)] = 1
    return out


class SubsetIndicator(FnFamily):
    """Members (h, R): bit at x is ``h(x) in R``; index = h * C(q, rho) + rank(R)."""

    kind = "subset-indicator"

    def __init__(self, shf: FnFamily, rho: int):
        if not 0 <= rho <= shf.q:
            raise InvalidParams("subset size out of range")
        self.shf, self.rho = shf, rho
        self.n_subsets = math.comb(shf.q, rho)
        super().__init__(shf.n, 2, shf.size * self.n_subsets)

    def row(self, i):
        h, j = divmod(self._index(i), self.n_subsets)
        R = unrank_combination(self.shf.q, self.rho, j)
        return np.isin(self.shf.row(h), R).astype(np.int32)

    def _to_array(self):
        H = self.shf.to_array()
        masks = _subset_masks(self.shf.q, self.rho)
        return masks[:, H].transpose(1, 0, 2).reshape(-1, self.n)

    def _patterns(self, cols):
        found = [indicator_patterns(p, self.shf.q, self.rho) for p in self.shf.patterns(cols)]
        return unique_rows(np.vstack(found), 2)

    def tree(self):
        return {"kind": self.kind, "size": self.size,
                "params": {"q": self.shf.q, "rho": self.rho}, "combine": "product",
                "children": [self.shf.tree(),
                             leaf("subsets", self.n_subsets, q=self.shf.q, rho=self.rho)]}


def base_cff_field(r: int, s: int) -> int:
    """Smallest prime power in (24 r s, 48 r s]."""
    return smallest_prime_power_in(24 * r * s, 48 * r * s)


@builder("base-cff")
def build_base_cff(n: int, r: int, s: int) -> FnFamily:
    """An (n, (r, s))-CFF of size |SHF| * C(q, r); built as (s, r) and complemented if r > s."""
    DesignParams(n, r, s)
    if r > s:
        return complement_family(build_base_cff(n, s, r))
    q = base_cff_field(r, s)
    shf = build_dense_shf(n, q, r, s, "1/2")
    fam = SubsetIndicator(shf, r)
    fam.kind = "base-cff"
    return fam


@lru_cache(maxsize=256)
def _bucket_cff(m: int, ones: int, zeros: int) -> FnFamily:
    """A CFF realizing ``ones`` ones against ``zeros`` zeros; constants at the edges."""
    if zeros == 0:
        return Constant(m, 2, 1)
    if ones == 0:
        return Constant(m, 2, 0)
    return build_base_cff(m, ones, zeros)


# -- assembly over a splitter ---------------------------------------------------------

class Assembled(FnFamily):
    """``x -> B(g(x) * m + x)`` for every splitter member g and block member B.

    ``blocks`` lives on the flattened domain [k] x [m]; member index is
    ``g * |blocks| + b``.
    """

    kind = "assembled"

    def __init__(self, splitter: FnFamily, blocks: FnFamily):
        m = splitter.n
        if blocks.n != splitter.q * m:
            raise InvalidParams("block domain must be (splitter range) x (splitter domain)")
        super().__init__(m, 2, splitter.size * blocks.size)
        self.splitter, self.blocks, self.m = splitter, blocks, m

    def row(self, i):
        g, b = divmod(self._index(i), self.blocks.size)
        flat = self.splitter.row(g).astype(np.int64) * self.m + np.arange(self.m)
        return self.blocks.row(b)[flat]

    def _to_array(self):
        G = self.splitter.to_array().astype(np.int64)
        B = self.blocks.to_array()
        flat = G * self.m + np.arange(self.m)
        return B[:, flat].transpose(1, 0, 2).reshape(-1, self.m)

    def _patterns(self, cols):
        found = [self.blocks.patterns(u.astype(np.int64) * self.m + cols)
                 for u in self.splitter.patterns(cols)]
        return unique_rows(np.vstack(found), 2)

    def tree(self):
        return {"kind": self.kind, "size": self.size, "params": {"m": self.m},
                "combine": "product",
                "children": [self.splitter.tree(), self.blocks.tree()]}


def _skeleton(n: int, r: int, s: int, k: int):
    """Shared PHF and splitter stages of both constructions."""
    p = DesignParams(n, r, s)
    if p.swapped:
        raise InvalidParams("constructions expect r <= s; use build_cff to normalize")
    if not 1 <= k <= r:
        raise InvalidParams(f"need 1 <= k <= r, got k={k}")
    d = p.d
    q1 = smallest_prime_power_in(d**3, 2 * d**3)
    m = min(n, q1)
    outer = build_phf(n, q1, d) if n > q1 else None
    H2 = build_splitter(m, r, k)
    k_eff = H2.splitter_params.k_eff
    lb, ub = r // k_eff, -(-r // k_eff)
    comps = CompositionList(d, k_eff, lb)
    if len(comps) > MAX_COMPOSITIONS:
        raise CapacityError(f"{len(comps)} compositions exceed the limit {MAX_COMPOSITIONS}")
    return outer, H2, m, k_eff, lb, ub, comps, q1


def _finish(outer, assembled, info):
    fam = assembled if outer is None else compose_families(outer, assembled)
    fam.build_info = info
    return fam


def _bucket_union(m: int, dprime: int, lb: int, ub: int) -> FnFamily:
    variants, tags = [], []
    for load in sorted({lb, ub}):
        if load <= dprime:
            variants.append(_bucket_cff(m, load, dprime - load))
            tags.append(f"load={load}")
    return variants[0] if len(variants) == 1 else Union(variants, tags)


@builder("construction1")
def build_cff_construction1(n: int, r: int, s: int, k: int) -> FnFamily:
    """Construction I: PHF, splitter, and products of per-bucket CFFs per composition."""
    outer, H2, m, k_eff, lb, ub, comps, q1 = _skeleton(n, r, s, k)
    cache = {}
    blocks, tags = [], []
    for c in comps:
        parts = []
        for dp in c:
            if dp not in cache:
                cache[dp] = _bucket_union(m, dp, lb, ub)
            parts.append(cache[dp])
        blocks.append(ProductBlocks(parts))
        tags.append(",".join(map(str, c)))
    blk = blocks[0] if len(blocks) == 1 else Union(blocks, tags)
    return _finish(outer, Assembled(H2, blk),
                   {"construction": "construction1", "q": q1, "k_requested": k,
                    "k_effective": k_eff, "compositions": len(comps)})


# -- multi-CFFs ---------------------------------------------------------------------

@dataclass(frozen=True)
class MultiCffSpec:
    """Per-block (ones, zeros) counts; the field sizes follow from them."""

    pairs: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(int(v) for v in p) for p in self.pairs))
        if not self.pairs:
            raise InvalidParams("a multi-CFF needs at least one block")
        if any(a < 0 or b < 0 for a, b in self.pairs):
            raise InvalidParams("block sizes must be nonnegative")

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def q(self) -> Tuple[int, ...]:
        """Prime power in (24 a b, 48 a b] per block; 1 for a trivial block."""
        return tuple(smallest_prime_power_in(24 * a * b, 48 * a * b) if a and b else 1
                     for a, b in self.pairs)

    @property
    def subset_sizes(self) -> Tuple[int, ...]:
        # a trivial block is all ones when it has no zeros, all zeros otherwise
        return tuple(a if b else 1 for a, b in self.pairs)


class MultiCFF(FnFamily):
    """Members (g, R_1..R_k): block i evaluates ``[h_{i, g_i}(x) in R_i]``.

    Block i uses the separating family ``shfs[i]`` padded cyclically to the
    common size t (member j of block i is member j mod |H_i|).  Point (i, x)
    is flattened to ``i * n + x``; member index is ``g * prod C(q_i, |R_i|)``
    plus the mixed-radix subset ranks, first block most significant.
    """

    kind = "mcff"

    def __init__(self, n: int, spec: MultiCffSpec, shfs: Sequence[FnFamily], G):
        self.spec, self.shfs, self.G = spec, list(shfs), G
        self.m = n
        self.rho = spec.subset_sizes
        self.n_subsets = [math.comb(h.q, p) for h, p in zip(self.shfs, self.rho)]
        self.inner = 1
        for c in self.n_subsets:
            self.inner *= c
        super().__init__(spec.k * n, 2, len(G) * self.inner)

    def _ranks(self, j):
        out = []
        for c in reversed(self.n_subsets):
            j, r = divmod(j, c)
            out.append(r)
        return out[::-1]

    def _member(self, i, gi):
        return int(self.G.points[gi, i]) % self.shfs[i].size

    def row(self, idx):
        gi, j = divmod(self._index(idx), self.inner)
        parts = []
        for i, (h, rk) in enumerate(zip(self.shfs, self._ranks(j))):
            R = unrank_combination(h.q, self.rho[i], rk)
            parts.append(np.isin(h.row(self._member(i, gi)), R).astype(np.int32))
        return np.concatenate(parts)

    def _to_array(self):
        masks = [_subset_masks(h.q, p) for h, p in zip(self.shfs, self.rho)]
        tables = [h.to_array() for h in self.shfs]
        out = []
        for gi in range(len(self.G)):
            parts = [(np.arange(i * self.m, (i + 1) * self.m),
                      masks[i][:, tables[i][self._member(i, gi)]])
                     for i in range(self.spec.k)]
            out.append(product_patterns(self.n, parts, 2))
        return np.vstack(out)

    def _patterns(self, cols):
        blocks = cols // self.m
        local = cols % self.m
        pos = [np.nonzero(blocks == i)[0] for i in range(self.spec.k)]
        # per block: pattern id of every SHF member restricted to the block's columns
        ids, pats = [], []
        for i, h in enumerate(self.shfs):
            if len(pos[i]) == 0:
                ids.append(np.zeros(h.size, dtype=np.int64))
                pats.append([None])
                continue
            rows = h.to_array()[:, local[pos[i]]]
            uniq, inv = np.unique(rows, axis=0, return_inverse=True)
            ids.append(inv.reshape(-1))
            pats.append([indicator_patterns(u, h.q, self.rho[i]) for u in uniq])
        keys = np.stack([ids[i][self.G.points[:, i] % self.shfs[i].size]
                         for i in range(self.spec.k)], axis=1)
        found = []
        for key in np.unique(keys, axis=0):
            parts = [(pos[i], pats[i][key[i]]) for i in range(self.spec.k) if len(pos[i])]
            found.append(product_patterns(len(cols), parts, 2))
        return unique_rows(np.vstack(found), 2)

    def tree(self):
        return {"kind": self.kind, "size": self.size,
                "params": {"pairs": [list(p) for p in self.spec.pairs],
                           "q": list(self.spec.q), "hitting_mode": self.G.mode},
                "combine": "product",
                "children": [leaf("hitting-set", len(self.G), t=self.G.t, k=self.G.k,
                                  mode=self.G.mode)]
                + [leaf("subsets", c, q=h.q, rho=p)
                   for c, h, p in zip(self.n_subsets, self.shfs, self.rho)]}


@builder("mcff")
def build_mcff(n: int, spec, mode: str = "exact-product", seed: int = 0) -> FnFamily:
    """A multi-CFF on [k] x [n] for the given per-block (ones, zeros) pairs."""
    if not isinstance(spec, MultiCffSpec):
        spec = MultiCffSpec(tuple(tuple(p) for p in spec))
    for a, b in spec.pairs:
        if a + b > n:
            raise InvalidParams(f"block pair ({a}, {b}) does not fit in [{n}]")
    shfs = []
    for (a, b), q in zip(spec.pairs, spec.q):
        shfs.append(build_dense_shf(n, q, a, b, "1/2") if a and b else Constant(n, 1))
    t = max(h.size for h in shfs)
    G = build_hitting_set(t, spec.k, Fraction(1, 3), mode, seed)
    fam = MultiCFF(n, spec, shfs, G)
    fam.descriptor = {"builder": "mcff",
                      "args": {"n": n, "spec": [list(p) for p in spec.pairs],
                               "mode": mode, "seed": seed}}
    return fam


def _disjoint_pairs(n: int, a: int, b: int) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    out = []
    for S1 in combinations(range(n), a):
        rest = [x for x in range(n) if x not in S1]
        for S2 in combinations(rest, b):
            out.append((S1, S2))
    return out


def _realizes(U: np.ndarray, pairs, offset: int) -> np.ndarray:
    """M x P matrix: member realizes pair p (ones on S1, zeros on S2) in this block."""
    out = np.ones((U.shape[0], len(pairs)), dtype=bool)
    for j, (S1, S2) in enumerate(pairs):
        ok = np.ones(U.shape[0], dtype=bool)
        if S1:
            ok &= U[:, [offset + x for x in S1]].all(axis=1)
        if S2:
            ok &= ~U[:, [offset + x for x in S2]].any(axis=1)
        out[:, j] = ok
    return out


def verify_mcff(H: FnFamily, spec, n: Optional[int] = None) -> Verdict:
    """Exhaustive multi-CFF check over every tuple of per-block disjoint pairs."""
    if not isinstance(spec, MultiCffSpec):
        spec = MultiCffSpec(tuple(tuple(p) for p in spec))
    n = H.n // spec.k if n is None else n
    if H.n != spec.k * n:
        raise InvalidParams("family domain is not k blocks of n points")
    for a, b in spec.pairs:
        if a + b > n:
            raise InvalidParams(f"block pair ({a}, {b}) does not fit in [{n}]")
    U = H.distinct_rows().astype(bool)
    lists = [_disjoint_pairs(n, a, b) for a, b in spec.pairs]
    mats = [_realizes(U, P, i * n).astype(np.float64) for i, P in enumerate(lists)]
    letters = "abcdefghijklmnopqrstuvwxyz"
    expr = ",".join("z" + letters[i] for i in range(spec.k)) + "->" + letters[:spec.k]
    counts = np.einsum(expr, *mats, optimize=True)
    bad = np.argwhere(counts == 0)
    if len(bad):
        combo = tuple(lists[i][j] for i, j in enumerate(bad[0]))
        pts = sorted(i * n + x for i, (S1, S2) in enumerate(combo) for x in S1 + S2)
        return Verdict(False, Witness("mcff", tuple(pts), combo,
                                      {"n": n, "pairs": spec.pairs}))
    return Verdict(True)


@register_replay("mcff")
def _replay_mcff(w: Witness, H: FnFamily) -> bool:
    n = w.params["n"]
    cols = np.array(w.index_set)
    pats = H.patterns(cols)
    ok = np.ones(pats.shape[0], dtype=bool)
    where = {int(c): j for j, c in enumerate(cols)}
    for i, (S1, S2) in enumerate(w.pattern):
        for x in S1:
            ok &= pats[:, where[i * n + x]] == 1
        for x in S2:
            ok &= pats[:, where[i * n + x]] == 0
    return not bool(ok.any())


@builder("construction2")
def build_cff_construction2(n: int, r: int, s: int, k: int,
                            mode: str = "exact-product", seed: int = 0) -> FnFamily:
    """Construction II: PHF, splitter, and one multi-CFF per composition."""
    outer, H2, m, k_eff, lb, ub, comps, q1 = _skeleton(n, r, s, k)
    blocks, tags = [], []
    for c in comps:
        options = [[(load, dp - load) for load in sorted({lb, ub}) if load <= dp] for dp in c]
        for pairs in product(*options):
            blocks.append(build_mcff(m, MultiCffSpec(pairs), mode, seed))
            tags.append(";".join(f"{a}/{b}" for a, b in pairs))
    blk = blocks[0] if len(blocks) == 1 else Union(blocks, tags)
    return _finish(outer, Assembled(H2, blk),
                   {"construction": "construction2", "q": q1, "k_requested": k,
                    "k_effective": k_eff, "compositions": len(comps), "hitting_mode": mode})


# -- size accounting -------------------------------------------------------------------

def binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def n_rs(r: int, s: int) -> float:
    """d C(d, r) / log2 C(d, r)."""
    d = r + s
    c = math.comb(d, r)
    return d * c / math.log2(c)


@dataclass
class SizeReport:
    """Closed-form yardsticks next to the exact constructed size."""

    n: int
    r: int
    s: int
    d: int
    log_base: int
    N_rs: float
    H2: float
    lower_bound: float
    regime: Optional[str] = None
    params: dict = field(default_factory=dict)
    stages: List[dict] = field(default_factory=list)
    final_size: Optional[int] = None
    tree: Optional[dict] = None

    @property
    def tree_product(self) -> Optional[int]:
        return None if self.tree is None else tree_size(self.tree)

    @property
    def accounting_ok(self) -> Optional[bool]:
        if self.tree is None or self.final_size is None:
            return None
        return self.tree_product == self.final_size

    def as_dict(self) -> dict:
        out = {k: getattr(self, k) for k in
               ("n", "r", "s", "d", "log_base", "N_rs", "H2", "lower_bound", "regime",
                "params", "stages", "final_size")}
        out["tree_product"] = self.tree_product
        out["accounting_ok"] = self.accounting_ok
        return out

    def lines(self) -> List[str]:
        out = [f"n={self.n} r={self.r} s={self.s} d={self.d} (logs base {self.log_base})",
               f"N(r,s)       = {self.N_rs:.6g}",
               f"H2(r/d)      = {self.H2:.6g}",
               f"N(r,s) log n = {self.lower_bound:.6g}"]
        if self.regime:
            out.append(f"regime       = {self.regime}")
        for k, v in self.params.items():
            out.append(f"{k:<12} = {v}")
        for st in self.stages:
            out.append(f"stage {st['path']:<24} {st['kind']:<20} size {st['size']}")
        if self.final_size is not None:
            out.append(f"|F|          = {self.final_size}")
            out.append(f"tree product = {self.tree_product}")
        return out


def _stages(tree: dict, path: str = "F", depth: int = 2) -> List[dict]:
    out = [{"path": path, "kind": tree["kind"], "size": tree["size"]}]
    if depth > 0:
        for i, c in enumerate(tree.get("children") or []):
            out.extend(_stages(c, f"{path}.{i}", depth - 1))
    return out


def size_report(n: int, r: int, s: int, family: Optional[FnFamily] = None,
                regime: Optional[str] = None, params: Optional[dict] = None) -> SizeReport:
    d = r + s
    N = n_rs(r, s)
    rep = SizeReport(n, r, s, d, 2, N, binary_entropy(r / d), N * math.log2(n),
                     regime, dict(params or {}))
    if family is not None:
        rep.tree = family.tree()
        rep.final_size = family.size
        rep.stages = _stages(rep.tree)
    return rep


# -- regime dispatch --------------------------------------------------------------------

REGIMES = ("base", "construction1", "construction2")


def choose_regime(r: int, s: int, phi: Optional[int] = None) -> Tuple[str, int]:
    """Regime and requested k for a normalized (r <= s) design."""
    d = r + s
    lg = math.log2(d)
    if r <= max(2, math.ceil(lg * lg)):
        return "base", 1
    regime = "construction2" if r >= d / math.ceil(lg) ** 2 else "construction1"
    return regime, choose_regime_k(r, s, regime, phi)


def phf_field(d: int) -> int:
    return smallest_prime_power_above(phf_threshold(d))


@builder("base-path")
def build_base_path(n: int, r: int, s: int) -> FnFamily:
    """Base CFF on a PHF range, composed with the PHF when that shrinks the domain."""
    DesignParams(n, r, s)
    q = phf_field(r + s)
    if n <= q:
        return build_base_cff(n, r, s)
    return compose_families(build_phf(n, q, r + s), build_base_cff(q, r, s))


class CffBuild(NamedTuple):
    family: FnFamily
    report: SizeReport


@builder("cff")
def build_cff(n: int, r: int, s: int, regime: Optional[str] = None, k: Optional[int] = None,
              phi: Optional[int] = None, mode: str = "exact-product") -> CffBuild:
    """Build an (n, (r, s))-CFF and its size report.

    ``regime``, ``k`` and ``phi`` override the automatic choices.
    """
    p = DesignParams(n, r, s)
    if p.swapped:
        inner = build_cff(n, s, r, regime, k, phi, mode)
        fam = complement_family(inner.family)
        rep = size_report(n, r, s, fam, "complement+" + inner.report.regime,
                          inner.report.params)
        return CffBuild(fam, rep)
    auto, _ = choose_regime(r, s, phi)
    regime = regime or auto
    if regime not in REGIMES:
        raise InvalidParams(f"unknown regime {regime!r}")
    params = {}
    if regime == "base":
        fam = build_base_path(n, r, s)
        params["q_phf"] = phf_field(r + s)
        params["q_base"] = base_cff_field(r, s)
    else:
        k_req = k or choose_regime_k(r, s, regime, phi)
        if regime == "construction1":
            fam = build_cff_construction1(n, r, s, k_req)
        else:
            fam = build_cff_construction2(n, r, s, k_req, mode)
        params.update(fam.build_info)
        sp = splitter_params(r, k_req)
        params["z"] = sp.z
        params["log2_sigma"] = sp.log2_sigma
    return CffBuild(fam, size_report(n, r, s, fam, regime, params))


def choose_regime_k(r: int, s: int, regime: str, phi: Optional[int] = None) -> int:
    """Default k for a forced regime."""
    lg = math.log2(r + s)
    if regime == "construction2":
        phi = phi or max(1, math.ceil(math.log2(lg)))
        return max(1, min(r, round(r / phi)))
    llg = math.log2(lg)
    return max(1, min(r, round(r / llg) if llg > 0 else r))


def check_build(fam: FnFamily, r: int, s: int) -> Verdict:
    """Exhaustive verification of a built family."""
    return verify_cff(fam, r, s)
