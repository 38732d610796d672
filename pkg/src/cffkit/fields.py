"""Prime powers and small finite fields.

Field elements of GF(p^e) are encoded as integers 0..q-1 whose base-p digits
are the coefficients of a polynomial modulo a fixed irreducible polynomial.
Element 0 is zero and element 1 is one in both the prime and extension cases.
"""
from __future__ import annotations

import math
from functools import lru_cache
from itertools import product
from typing import Optional, Tuple

import numpy as np

from .errors import InvalidParams


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    if x % 2 == 0:
        return x == 2
    f = 3
    while f * f <= x:
        if x % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> Optional[Tuple[int, int]]:
    """Return ``(p, e)`` with ``q == p**e`` or None if q is not a prime power."""
    if q < 2:
        return None
    p = 2
    while p * p <= q:
        if q % p == 0:
            break
        p += 1
    else:
        return (q, 1)
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    return (p, e) if q == 1 else None


def is_prime_power(q: int) -> bool:
    return prime_power(q) is not None


def smallest_prime_power_above(x: float) -> int:
    """Smallest prime power strictly greater than x."""
    q = max(2, math.floor(x) + 1)
    while not is_prime_power(q):
        q += 1
    return q


def smallest_prime_power_in(lo: float, hi: float) -> int:
    """Smallest prime power q with lo < q <= hi."""
    q = smallest_prime_power_above(lo)
    if q > hi:
        raise InvalidParams(f"no prime power in ({lo}, {hi}]")
    return q


def smallest_prime_at_least(x: int) -> int:
    p = max(2, x)
    while not is_prime(p):
        p += 1
    return p


def _poly_mod(a, m, p):
    # a, m: coefficient lists, lowest degree first; m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < dm:
            break
        c = a[-1]
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        while a and a[-1] == 0:
            a.pop()
    return a


def _is_irreducible(m, p):
    deg = len(m) - 1
    for dd in range(1, deg // 2 + 1):
        for tail in product(range(p), repeat=dd):
            f = list(tail) + [1]
            if not _poly_mod(m, f, p):
                return False
    return True


@lru_cache(maxsize=None)
def _irreducible(p: int, e: int) -> Tuple[int, ...]:
    for tail in product(range(p), repeat=e):
        m = list(tail) + [1]
        if m[0] == 0:
            continue
        if _is_irreducible(m, p):
            return tuple(m)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class GF:
    """Arithmetic in GF(q) on numpy integer arrays."""

    def __init__(self, q: int):
        pe = prime_power(q)
        if pe is None:
            raise InvalidParams(f"{q} is not a prime power")
        self.q = q
        self.p, self.e = pe
        if self.e > 1:
            self._build_tables()

    def _build_tables(self):
        p, e, q = self.p, self.e, self.q
        m = _irreducible(p, e)
        self.modulus = m
        self._digits = np.array(
            [[(x // p**i) % p for i in range(e)] for x in range(q)], dtype=np.int64
        )
        self._weights = p ** np.arange(e, dtype=np.int64)

        def mul_int(a, b):
            da = [(a // p**i) % p for i in range(e)]
            db = [(b // p**i) % p for i in range(e)]
            prod = [0] * (2 * e - 1)
            for i, x in enumerate(da):
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
            r = _poly_mod(prod, list(m), p)
            return sum(c * p**i for i, c in enumerate(r))

        # find a primitive element and build log/exp tables
        for g in range(2, q):
            exp = [1]
            x = 1
            for _ in range(q - 2):
                x = mul_int(x, g)
                if x == 1:
                    break
                exp.append(x)
            if len(exp) == q - 1:
                break
        self._exp = np.array(exp + exp, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        log[np.array(exp)] = np.arange(q - 1)
        self._log = log

    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        s = (self._digits[a] + self._digits[b]) % self.p
        return s @ self._weights

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a * b) % self.p
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.e == 1:
            return (-a) % self.p
        return ((-self._digits[a]) % self.p) @ self._weights

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        if self.e == 1:
            return np.vectorize(lambda x: pow(int(x), self.p - 2, self.p))(a).astype(np.int64)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]


@lru_cache(maxsize=64)
def field(q: int) -> GF:
    return GF(q)


def digits(x, base: int, count: int) -> np.ndarray:
    """Base-``base`` digits of each x (lowest first), shape ``x.shape + (count,)``."""
    x = np.asarray(x, dtype=np.int64)
    powers = base ** np.arange(count, dtype=np.int64)
    return (x[..., None] // powers) % base


def digit_count(n: int, base: int) -> int:
    """Smallest m >= 1 with base**m >= n."""
    m = 1
    while base**m < n:
        m += 1
    return m
