"""Exact arithmetic in GF(p^e).

Field elements are plain Python ints in [0, q).  The integer n encodes the
polynomial-basis element sum(d_w * x^w) where (d_0, d_1, ...) are the base-p
digits of n, least significant first.  In particular 0 is the additive and 1
the multiplicative identity, and for prime fields the encoding is the residue
itself.

The reducing polynomial is the lexicographically smallest monic irreducible of
degree e over F_p, compared as the coefficient sequence (c_0, ..., c_{e-1}, 1)
with the constant term first.  It is found by deterministic search, so two
runs (or two implementations) agree on every encoding without an external
polynomial table.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

from .errors import DivisionByZero, UnsupportedField

MAX_Q = 2**20
_TABLE_LIMIT = 2**12  # build exp/log tables up to this field size


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n, ascending."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- polynomial helpers over F_p (dense little-endian coefficient lists) ---


def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(p, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(out)


def _pmod(p, a, m):
    """a mod m with m monic."""
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    return _ptrim(a)


def _poly_is_irreducible(p: int, poly: list[int]) -> bool:
    """Monic poly over F_p; trial division by every monic poly of degree <= deg/2."""
    e = len(poly) - 1
    if e == 1:
        return True
    if poly[0] == 0:  # divisible by x
        return False
    for d in range(1, e // 2 + 1):
        for enc in range(p**d):
            div = _digits_of(enc, p, d) + [1]
            if not _pmod(p, poly, div):
                return False
    return True


def _digits_of(n: int, p: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        out.append(n % p)
        n //= p
    return out


def canonical_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree e over F_p.

    Returned constant-term first, including the leading 1.  The comparison is
    on the constant-first sequence (c_0, ..., c_{e-1}), so itertools.product
    (first coordinate most significant) enumerates candidates in order.
    """
    if e == 1:
        return (0, 1)
    for cs in itertools.product(range(p), repeat=e):
        cand = list(cs) + [1]
        if _poly_is_irreducible(p, cand):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldCtx:
    """A concrete GF(p^e) with fixed reducing polynomial and integer encoding."""

    def __init__(self, p: int, e: int, irreducible=None):
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if e < 1:
            raise ValueError(f"e={e} must be >= 1")
        q = p**e
        if q > MAX_Q:
            raise ValueError(f"q={q} exceeds the supported limit {MAX_Q}")
        if irreducible is None:
            irreducible = canonical_irreducible(p, e)
        else:
            irreducible = tuple(int(c) % p for c in irreducible)
            if len(irreducible) != e + 1 or irreducible[-1] != 1:
                raise ValueError("reducing polynomial must be monic of degree e")
            if not _poly_is_irreducible(p, list(irreducible)):
                raise ValueError("reducing polynomial is reducible")
        self.p = p
        self.e = e
        self.q = q
        self.irreducible = irreducible
        self._exp = None  # exp/log tables, built for small fields
        self._log = None
        self._generator = None
        if q <= _TABLE_LIMIT:
            self._build_tables()

    # -- identity / hashing -------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FieldCtx)
            and (self.p, self.e, self.irreducible) == (other.p, other.e, other.irreducible)
        )

    def __hash__(self):
        return hash((self.p, self.e, self.irreducible))

    def __repr__(self):
        return f"FieldCtx(p={self.p}, e={self.e})"

    def descriptor(self) -> dict:
        return {"p": self.p, "e": self.e, "irreducible": list(self.irreducible)}

    # -- encoding -----------------------------------------------------------

    def digits(self, a: int) -> list[int]:
        return _digits_of(a, self.p, self.e)

    def from_digits(self, ds) -> int:
        n = 0
        for d in reversed(list(ds)):
            n = n * self.p + d % self.p
        return n

    @property
    def elements(self) -> range:
        return range(self.q)

    @property
    def units(self) -> range:
        return range(1, self.q)

    # -- raw polynomial arithmetic (used to bootstrap the tables) -----------

    def _raw_mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        prod = _pmul(self.p, self.digits(a), self.digits(b))
        return self.from_digits(_pmod(self.p, prod, list(self.irreducible)))

    def _raw_pow(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self._raw_mul(r, a)
            a = self._raw_mul(a, a)
            n >>= 1
        return r

    def _order(self, a: int) -> int:
        n = self.q - 1
        for r in prime_factors(n):
            while n % r == 0 and self._raw_pow(a, n // r) == 1:
                n //= r
        return n

    def _build_tables(self):
        g = 1
        if self.q > 2:
            g = next(a for a in range(2, self.q) if self._order(a) == self.q - 1)
        exp = [1] * (self.q - 1)
        for i in range(1, self.q - 1):
            exp[i] = self._raw_mul(exp[i - 1], g)
        log = [0] * self.q
        for i, v in enumerate(exp):
            log[v] = i
        self._exp, self._log, self._generator = exp, log, g

    # -- field operations ----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        p = self.p
        return self.from_digits((x + y) % p for x, y in zip(self.digits(a), self.digits(b)))

    def sub(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a - b) % self.p
        p = self.p
        return self.from_digits((x - y) % p for x, y in zip(self.digits(a), self.digits(b)))

    def neg(self, a: int) -> int:
        return self.sub(0, a)

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return self._raw_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of 0")
        if self._exp is not None:
            return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]
        return self._raw_pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n == 0:
                return 1
            if n < 0:
                raise DivisionByZero("0 to a negative power")
            return 0
        n %= self.q - 1
        if self._exp is not None:
            return self._exp[(self._log[a] * n) % (self.q - 1)]
        return self._raw_pow(a, n)

    def frobenius(self, a: int, w: int = 1) -> int:
        return self.pow(a, self.p**w)

    def trace(self, a: int) -> int:
        """Tr(a) = a + a^p + ... + a^{p^{e-1}}; always lands in the prime subfield."""
        t = a
        acc = a
        for _ in range(self.e - 1):
            t = self.pow(t, self.p)
            acc = self.add(acc, t)
        assert acc < self.p, "trace left the prime subfield"
        return acc

    def poly_eval(self, coeffs, x: int) -> int:
        """Evaluate sum(coeffs[w] * x^w) by Horner's rule."""
        acc = 0
        for c in reversed(list(coeffs)):
            acc = self.add(self.mul(acc, x), c)
        return acc


@lru_cache(maxsize=None)
def field_pe(p: int, e: int) -> FieldCtx:
    return FieldCtx(p, e)


@lru_cache(maxsize=None)
def field(q: int) -> FieldCtx:
    """FieldCtx for the prime power q with the canonical reducing polynomial."""
    if q < 2:
        raise ValueError(f"q={q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            e = 0
            n = q
            while n % p == 0:
                n //= p
                e += 1
            if n != 1:
                raise ValueError(f"q={q} is not a prime power")
            return field_pe(p, e)
    raise ValueError(f"q={q} is not a prime power")


@lru_cache(maxsize=None)
def find_primitive(ctx: FieldCtx) -> int:
    """Smallest encoding that generates the multiplicative group."""
    if ctx.q == 2:
        return 1
    return next(a for a in range(2, ctx.q) if ctx._order(a) == ctx.q - 1)


@lru_cache(maxsize=None)
def find_primitive_zero_inv_trace(ctx: FieldCtx) -> int:
    """Smallest primitive w with trace(1/w) = 0; binary fields with e >= 3 only."""
    if ctx.p != 2 or ctx.e < 3:
        raise UnsupportedField(f"needs p=2 and e>=3, got GF({ctx.q})")
    for a in range(2, ctx.q):
        if ctx._order(a) == ctx.q - 1 and ctx.trace(ctx.inv(a)) == 0:
            return a
    raise AssertionError(f"no prescribed-trace primitive element in GF({ctx.q})")


# --- bit-mask subsets of the field (bit i <-> element encoding i) -----------


def mask_of(elems) -> int:
    m = 0
    for x in elems:
        m |= 1 << x
    return m


def mask_elems(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def mask_full(q: int) -> int:
    return (1 << q) - 1


def mask_complement(mask: int, q: int) -> int:
    return mask ^ mask_full(q)


def mask_to_hex(mask: int, q: int) -> str:
    width = max(1, math.ceil(q / 4))
    return format(mask, f"0{width}x")


def mask_from_hex(text: str, q: int) -> int:
    mask = int(text, 16)
    if mask >= (1 << q):
        raise ValueError(f"mask {text!r} has bits beyond the field size {q}")
    return mask
