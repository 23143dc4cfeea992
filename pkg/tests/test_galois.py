"""Field construction, arithmetic axioms, trace, primitive elements, masks."""

import pytest

from qmlab.errors import DivisionByZero, UnsupportedField
from qmlab.galois import (
    FieldCtx,
    canonical_irreducible,
    field,
    field_pe,
    find_primitive,
    find_primitive_zero_inv_trace,
    mask_complement,
    mask_elems,
    mask_from_hex,
    mask_of,
    mask_to_hex,
)

SMALL_Q = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64, 81, 121, 125, 128]


def test_canonical_irreducibles():
    # Derived by hand: smallest (c0, c1, ..., 1) in lexicographic order that
    # has no nontrivial monic divisor.
    assert canonical_irreducible(7, 1) == (0, 1)
    assert canonical_irreducible(2, 2) == (1, 1, 1)  # x^2+x+1
    assert canonical_irreducible(3, 2) == (1, 0, 1)  # x^2+1 (-1 is no square mod 3)
    assert canonical_irreducible(2, 3) == (1, 0, 1, 1)  # x^3+x^2+1, before x^3+x+1
    assert canonical_irreducible(2, 4) == (1, 0, 0, 1, 1)  # x^4+x^3+1
    assert canonical_irreducible(5, 2) == (1, 1, 1)  # x^2+1 splits (2^2=-1); x^2+x+1 does not
    assert canonical_irreducible(11, 2) == (1, 0, 1)


def test_bad_construction():
    with pytest.raises(ValueError):
        FieldCtx(6, 1)
    with pytest.raises(ValueError):
        FieldCtx(2, 0)
    with pytest.raises(ValueError):
        FieldCtx(2, 3, irreducible=(1, 0, 0, 1))  # x^3+1 = (x+1)(x^2+x+1)
    with pytest.raises(ValueError):
        FieldCtx(2, 3, irreducible=(1, 1, 1))  # wrong degree
    with pytest.raises(ValueError):
        field(12)
    with pytest.raises(ValueError):
        field(1)


def test_prime_field_ops():
    f7 = field(7)
    assert f7.mul(3, 5) == 1
    assert f7.add(6, 6) == 5
    assert f7.sub(0, 1) == 6
    assert f7.inv(3) == 5
    assert f7.div(1, 2) == 4
    assert f7.pow(3, 6) == 1
    assert f7.pow(0, 0) == 1
    with pytest.raises(DivisionByZero):
        f7.inv(0)
    with pytest.raises(DivisionByZero):
        f7.div(3, 0)


def test_gf4_multiplication_forced_by_modulus():
    f4 = field(4)
    w = 2  # the class of x
    assert f4.mul(w, w) == f4.add(w, 1)  # x^2 = x+1 mod x^2+x+1
    assert f4.mul(w, 1) == w


def test_field_axioms_exhaustive():
    for q in [4, 5, 7, 8, 9, 16, 27]:
        ctx = field(q)
        for a in ctx.elements:
            assert ctx.mul(a, 1) == a
            assert ctx.add(a, ctx.neg(a)) == 0
            if a:
                assert ctx.mul(a, ctx.inv(a)) == 1
                assert ctx.pow(a, q - 1) == 1
            for b in ctx.elements:
                assert ctx.mul(a, b) == ctx.mul(b, a)
                assert ctx.add(a, b) == ctx.add(b, a)
        # distributivity on a sample grid
        for a in range(0, q, 3):
            for b in range(0, q, 2):
                for c in ctx.elements:
                    lhs = ctx.mul(a, ctx.add(b, c))
                    rhs = ctx.add(ctx.mul(a, b), ctx.mul(a, c))
                    assert lhs == rhs


def test_mul_matches_raw_polynomial_mul():
    # the exp/log fast path must agree with schoolbook reduction
    for q in [8, 9, 16, 49]:
        ctx = field(q)
        for a in ctx.elements:
            for b in ctx.elements:
                assert ctx.mul(a, b) == ctx._raw_mul(a, b)


def test_trace_values():
    assert field(7).trace(5) == 5  # e=1: identity
    for q in SMALL_Q:
        assert field(q).trace(0) == 0
    f8 = field(8)
    assert f8.trace(1) == 1  # 1+1+1 over F_2
    f4 = field(4)
    assert f4.trace(2) == 1  # w + w^2 = 1
    assert f4.trace(1) == 0


def test_trace_linear_surjective_kernel_size():
    for q in [4, 8, 9, 16, 25, 27, 32, 49, 64, 81, 121, 125, 128]:
        ctx = field(q)
        p = ctx.p
        images = set()
        kernel = 0
        for a in ctx.elements:
            t = ctx.trace(a)
            assert t < p
            images.add(t)
            if t == 0:
                kernel += 1
            # F_p-linearity: trace(c*a) = c*trace(a) for c in the prime subfield
            for c in range(p):
                assert ctx.trace(ctx.mul(c, a)) == (c * t) % p
        assert images == set(range(p))
        assert kernel == p ** (ctx.e - 1)


def test_trace_additive_and_frobenius_invariant():
    for q in [8, 9, 16, 27, 64]:
        ctx = field(q)
        for a in ctx.elements:
            assert ctx.trace(ctx.pow(a, ctx.p)) == ctx.trace(a)
            for b in range(0, q, 3):
                assert ctx.trace(ctx.add(a, b)) == (ctx.trace(a) + ctx.trace(b)) % ctx.p


def test_find_primitive():
    assert find_primitive(field(7)) == 3
    assert find_primitive(field(2)) == 1
    assert find_primitive(field(4)) == 2
    for q in SMALL_Q:
        ctx = field(q)
        g = find_primitive(ctx)
        seen = set()
        x = 1
        for _ in range(q - 1):
            seen.add(x)
            x = ctx.mul(x, g)
        assert len(seen) == q - 1


def test_find_primitive_zero_inv_trace():
    with pytest.raises(UnsupportedField):
        find_primitive_zero_inv_trace(field(4))
    with pytest.raises(UnsupportedField):
        find_primitive_zero_inv_trace(field(9))
    # witness for every binary field with 3 <= e <= 7
    for e in range(3, 8):
        ctx = field_pe(2, e)
        w = find_primitive_zero_inv_trace(ctx)
        assert ctx._order(w) == ctx.q - 1
        assert ctx.trace(ctx.inv(w)) == 0
    assert find_primitive_zero_inv_trace(field(8)) == 2  # the class of x


def test_masks_roundtrip():
    q = 7
    m = mask_of({0, 2, 5})
    assert m == 0b0100101
    assert mask_elems(m) == (0, 2, 5)
    assert mask_complement(m, q) == mask_of({1, 3, 4, 6})
    assert mask_to_hex(m, q) == "25"
    assert mask_from_hex("25", q) == m
    with pytest.raises(ValueError):
        mask_from_hex("ff", 7)


def test_poly_eval():
    f7 = field(7)
    assert f7.poly_eval((2, 3), 0) == 2  # 3x+2 at 0
    assert f7.poly_eval((2, 3), 1) == 5
    assert f7.poly_eval((2, 3), 2) == 1
    assert f7.poly_eval((0, 0, 1), 5) == 4  # x^2 at 5
