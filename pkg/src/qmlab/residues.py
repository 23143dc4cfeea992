"""Restricted product sets, square-root representative systems, scaled pairs.

The restricted set Omega_q is the set of nonzero squares for odd
characteristic and, for binary fields with e >= 3, the even powers
{w^(2i) : 0 <= i <= 2^(e-1)-2} of the canonical primitive element w with
trace(1/w) = 0.  A square-root system picks one canonical root per member of
Omega_q; which root is legal depends on the field's regime:

* P3MOD4_E_ODD   (-1 is not a square): each square has exactly one square
  root that is itself a square; take it.
* P1MOD4_OR_E_EVEN (-1 is a square): members of the fourth-power set get
  their smallest square root (both roots are squares); the remaining squares
  get their smallest root outside QR and outside the exclusion set Upsilon.
* BINARY: sqrt(w^(2i)) = w^i.

Every "arbitrary" choice is resolved to the smallest element encoding so that
two runs produce identical tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import (
    InvalidDelta,
    NoPairExists,
    RegimeMismatch,
    UnsupportedField,
)
from .galois import FieldCtx, find_primitive_zero_inv_trace

P3MOD4_E_ODD = "P3MOD4_E_ODD"
P1MOD4_OR_E_EVEN = "P1MOD4_OR_E_EVEN"
BINARY = "BINARY"


@dataclass(frozen=True)
class OmegaSet:
    ctx: FieldCtx
    kind: str  # "QR" | "W"
    elements: tuple[int, ...]
    omega: int | None = None

    def __contains__(self, x: int) -> bool:
        return x in self.member_set

    @cached_property
    def member_set(self) -> frozenset:
        return frozenset(self.elements)


@lru_cache(maxsize=None)
def _qr_set(ctx: FieldCtx) -> frozenset:
    return frozenset(ctx.mul(x, x) for x in ctx.units)


@lru_cache(maxsize=None)
def omega_set(ctx: FieldCtx) -> OmegaSet:
    if ctx.q in (2, 4):
        raise UnsupportedField(f"no restricted set over GF({ctx.q})")
    if ctx.p > 2:
        elems = tuple(sorted(_qr_set(ctx)))
        assert len(elems) == (ctx.q - 1) // 2
        return OmegaSet(ctx, "QR", elems)
    w = find_primitive_zero_inv_trace(ctx)
    elems = set()
    x = 1
    w2 = ctx.mul(w, w)
    for _ in range(2 ** (ctx.e - 1) - 1):
        elems.add(x)
        x = ctx.mul(x, w2)
    assert len(elems) == 2 ** (ctx.e - 1) - 1
    return OmegaSet(ctx, "W", tuple(sorted(elems)), omega=w)


def quadratic_character(ctx: FieldCtx, x: int) -> int:
    """chi(x): 0 at 0, +1 on nonzero squares, -1 otherwise.  Odd p only."""
    if ctx.p == 2:
        raise UnsupportedField("quadratic character needs odd characteristic")
    if x == 0:
        return 0
    return 1 if x in _qr_set(ctx) else -1


def minus_one_is_residue(ctx: FieldCtx) -> bool:
    if ctx.p == 2:
        raise UnsupportedField("needs odd characteristic")
    return quadratic_character(ctx, ctx.neg(1)) == 1


def quartic_residues(ctx: FieldCtx) -> frozenset:
    """Fourth powers of the units; equals the squares of the nonzero squares."""
    if ctx.p == 2:
        raise UnsupportedField("needs odd characteristic")
    return frozenset(ctx.mul(x, x) for x in _qr_set(ctx))


def regime_of(ctx: FieldCtx) -> str:
    if ctx.p == 2:
        return BINARY
    if ctx.p % 4 == 3 and ctx.e % 2 == 1:
        return P3MOD4_E_ODD
    return P1MOD4_OR_E_EVEN


def _square_roots(ctx: FieldCtx, y: int) -> list[int]:
    return sorted(x for x in ctx.elements if ctx.mul(x, x) == y)


def upsilon_set(ctx: FieldCtx, a: int, b: int, partial_roots: dict) -> frozenset:
    """The exclusion set {(a/b) * sqrt(g) : g a fourth power}.

    Needs the -1-is-a-square regime, a a nonzero square, b a non-square, and
    partial_roots assigning a square root inside QR to every fourth power.
    The result lies inside the non-squares and contains no pair {y, -y}: the
    two roots of a fourth power are negatives of each other and partial_roots
    keeps exactly one per element.
    """
    if regime_of(ctx) != P1MOD4_OR_E_EVEN:
        raise RegimeMismatch(f"upsilon set undefined in regime {regime_of(ctx)}")
    if quadratic_character(ctx, a) != 1 or quadratic_character(ctx, b) != -1:
        raise RegimeMismatch("need a a nonzero square and b a non-square")
    r4 = quartic_residues(ctx)
    qr = _qr_set(ctx)
    ratio = ctx.div(a, b)
    out = set()
    for g in r4:
        root = partial_roots[g]
        assert ctx.mul(root, root) == g and root in qr
        out.add(ctx.mul(ratio, root))
    assert len(out) == len(r4)
    assert all(quadratic_character(ctx, y) == -1 for y in out)
    assert not any(ctx.neg(y) in out for y in out)
    return frozenset(out)


@dataclass(frozen=True)
class SqrtSystem:
    ctx: FieldCtx
    omega_set: OmegaSet
    root: dict  # gamma -> canonical sqrt(gamma), for gamma in Omega_q
    regime: str

    def sqrt(self, gamma: int) -> int:
        try:
            return self.root[gamma]
        except KeyError:
            raise RegimeMismatch(
                f"{gamma} is outside the restricted set of GF({self.ctx.q})"
            ) from None


@lru_cache(maxsize=None)
def build_sqrt_system(ctx: FieldCtx) -> SqrtSystem:
    if ctx.q in (2, 4, 5):
        raise UnsupportedField(f"no square-root system over GF({ctx.q})")
    om = omega_set(ctx)
    regime = regime_of(ctx)
    root: dict[int, int] = {}
    if regime == BINARY:
        w = om.omega
        x = 1  # w^(2i); its canonical root is w^i
        r = 1
        for _ in range(len(om.elements)):
            root[x] = r
            x = ctx.mul(x, ctx.mul(w, w))
            r = ctx.mul(r, w)
    elif regime == P3MOD4_E_ODD:
        qr = _qr_set(ctx)
        for g in om.elements:
            inside = [x for x in _square_roots(ctx, g) if x in qr]
            assert len(inside) == 1  # unique square root inside QR
            root[g] = inside[0]
    else:
        qr = _qr_set(ctx)
        r4 = quartic_residues(ctx)
        for g in sorted(r4):
            root[g] = next(x for x in _square_roots(ctx, g) if x in qr)
        # exclusion set built from the canonical square/non-square pair (1, b0)
        b0 = min(x for x in ctx.units if x not in qr)
        ups = upsilon_set(ctx, 1, b0, root)
        for g in sorted(om.member_set - r4):
            root[g] = next(
                x for x in _square_roots(ctx, g) if x not in qr and x not in ups
            )
    for g, r in root.items():
        assert ctx.mul(r, r) == g
    return SqrtSystem(ctx, om, root, regime)


@dataclass(frozen=True)
class ScaledPair:
    a: int
    b: int


@lru_cache(maxsize=None)
def _b11_set(ctx: FieldCtx) -> frozenset:
    return frozenset(ctx.add(m, ctx.inv(m)) for m in ctx.units)


def scaled_pair(ctx: FieldCtx, sqrt_system: SqrtSystem | None = None) -> ScaledPair:
    """Two members a, b of B_1(1)* whose root-scaled copies tile almost all units.

    For every d in Omega_q, the union of sqrt(g)*{a, b} over g in
    Omega_q \\ {d} has exactly q-3 elements (odd q) or q-4 (binary).  The
    choice is regime dependent:

    * P3MOD4_E_ODD: smallest square and smallest non-square in B_1(1)*.
      Scaling the square roots of the squares (= QR itself) by a keeps them
      squares while b moves them onto the non-squares, so the two copies
      never collide.
    * P1MOD4_OR_E_EVEN: (a, -a) with a the smallest square in B_1(1)*.  The
      canonical roots hit one of each pair {r, -r}, so {a*root, -a*root}
      ranges over a * (units minus the two roots of the excluded d) no matter
      how the per-element root was chosen.  (Here -a is itself a square; a
      square/non-square pair cannot work in this regime: the root set would
      have to be invariant under multiplication by -a/b, whose order is even,
      while any such invariant transversal forces odd order.)
    * BINARY: (w^(2^(e-1)), w); both lie in B_1(1) because trace(1/w) = 0 and
      the trace is Frobenius invariant.

    Over GF(5) no pair of any kind exists: B_1(1)* = {2, 3} consists of
    non-squares only and -2 = 3 shares its square class with 2.
    """
    if ctx.q == 5:
        raise NoPairExists("B_1(1)* over GF(5) = {2,3} admits no usable pair")
    if sqrt_system is None:
        sqrt_system = build_sqrt_system(ctx)
    b11 = _b11_set(ctx) - {0}
    regime = sqrt_system.regime
    if regime == BINARY:
        w = sqrt_system.omega_set.omega
        a = ctx.pow(w, 2 ** (ctx.e - 1))
        b = w
    elif regime == P3MOD4_E_ODD:
        qr = _qr_set(ctx)
        a = min(y for y in b11 if y in qr)
        b = min(y for y in b11 if y not in qr)
    else:
        qr = _qr_set(ctx)
        a = min(y for y in b11 if y in qr)
        b = ctx.neg(a)
    assert a != b and a != 0 and b != 0
    assert a in b11 and b in b11
    return ScaledPair(a, b)


def scaled_pair_union_size(
    ctx: FieldCtx, sqrt_system: SqrtSystem, pair: ScaledPair, delta: int
) -> int:
    """|union over g in Omega_q \\ {delta} of sqrt(g) * {a, b}|."""
    om = sqrt_system.omega_set
    if delta not in om:
        raise InvalidDelta(f"{delta} is not in the restricted set of GF({ctx.q})")
    union = set()
    for g in om.elements:
        if g == delta:
            continue
        r = sqrt_system.root[g]
        union.add(ctx.mul(r, pair.a))
        union.add(ctx.mul(r, pair.b))
    return len(union)
