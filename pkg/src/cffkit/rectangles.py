"""Hitting sets for combinatorial rectangles in [t]^k.

A rectangle R_1 x ... x R_k has sidewise density gamma when every side has at
least gamma * t elements.  Two realizations are offered: the full cube, which
hits every nonempty rectangle, and a seeded random sample that is explicitly
not certified.  Consumers that use the heuristic must re-verify what they
build from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import Verdict, Witness
from .errors import InvalidParams
from .family import check_capacity, parse_header

MODES = ("exact-product", "heuristic-random")


@dataclass(frozen=True)
class PointSet:
    """Points of [t]^k (0-based coordinates) with the mode that produced them."""

    t: int
    k: int
    points: np.ndarray
    mode: str
    certified: bool

    def __len__(self):
        return self.points.shape[0]


def heuristic_size(t: int, k: int, gamma, c: float = 1.0, delta: float = 0.01) -> int:
    """ceil(c (1/gamma)^k (k ln t + ln(1/delta)))."""
    g = float(Fraction(str(gamma)) if not isinstance(gamma, Fraction) else gamma)
    return math.ceil(c * (1 / g) ** k * (k * math.log(t) + math.log(1 / delta)))


def build_hitting_set(t: int, k: int, gamma="1/3", mode: str = "exact-product",
                      seed: int = 0, c: float = 1.0, delta: float = 0.01) -> PointSet:
    """A hitting set for rectangles of sidewise density ``gamma`` in [t]^k."""
    g = Fraction(str(gamma)) if not isinstance(gamma, Fraction) else gamma
    if not 0 < g <= 1:
        raise InvalidParams("gamma must lie in (0, 1]")
    if t < 1 or k < 1:
        raise InvalidParams("need t >= 1 and k >= 1")
    if mode == "exact-product":
        check_capacity(t**k, "exact-product hitting set (try heuristic-random)")
        pts = np.indices((t,) * k).reshape(k, -1).T.astype(np.int64)
        return PointSet(t, k, pts, mode, True)
    if mode == "heuristic-random":
        size = heuristic_size(t, k, g, c, delta)
        check_capacity(size, "heuristic hitting set")
        rng = np.random.default_rng(seed)
        pts = rng.integers(0, t, size=(size, k), dtype=np.int64)
        return PointSet(t, k, pts, mode, False)
    raise InvalidParams(f"unknown mode {mode!r}; choose from {MODES}")


def verify_hitting_set(H: PointSet, rectangles: Sequence[Sequence[Sequence[int]]]) -> Verdict:
    """True iff every rectangle (k side subsets, 0-based) contains a point of H.

    The witness of a miss carries the rectangle as ``pattern``.
    """
    for rect in rectangles:
        if len(rect) != H.k:
            raise InvalidParams(f"rectangle has {len(rect)} sides, expected {H.k}")
        for side in rect:
            if len(side) == 0 or min(side) < 0 or max(side) >= H.t:
                raise InvalidParams(f"malformed rectangle side {side!r}")
    for rect in rectangles:
        inside = np.ones(len(H), dtype=bool)
        for i, side in enumerate(rect):
            inside &= np.isin(H.points[:, i], np.asarray(side))
        if not inside.any():
            return Verdict(False, Witness("rectangle", (),
                                          tuple(tuple(sorted(s)) for s in rect),
                                          {"t": H.t, "k": H.k}))
    return Verdict(True)


def write_point_set(H: PointSet, stream) -> None:
    stream.write(f"HS t={H.t} k={H.k} N={len(H)} mode={H.mode}\n")
    for p in H.points:
        stream.write(" ".join(str(int(v) + 1) for v in p) + "\n")


def read_point_set(stream) -> PointSet:
    lines = stream.read().splitlines()
    h = parse_header(lines[0], "HS")
    t, k, N, mode = int(h["t"]), int(h["k"]), int(h["N"]), h.get("mode", "exact-product")
    body = lines[1:]
    if len(body) != N:
        raise InvalidParams(f"header says N={N} but file has {len(body)} points")
    pts = np.array([[int(v) - 1 for v in line.split()] for line in body],
                   dtype=np.int64).reshape(N, k)
    if pts.size and (pts.min() < 0 or pts.max() >= t):
        raise InvalidParams("point coordinate out of range")
    return PointSet(t, k, pts, mode, mode == "exact-product")
