"""Tests for lines, buckets, evaluation images, relabels, and encoding."""

from __future__ import annotations

import pytest

from qmlab.errors import DuplicatePoints, PreconditionViolated, RegimeMismatch, UnsupportedField
from qmlab.galois import field
from qmlab.residues import build_sqrt_system, omega_set
from qmlab.rscode import (
    b11,
    bucket,
    bucket_eval,
    encode,
    g_line,
    h_line,
    line_eval,
    make_line,
    relabel,
    scalar_evolution,
)

SUPPORTED_Q = [3, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64]


def test_make_line_product():
    ctx = field(7)
    line = make_line(ctx, 3, 5)
    assert (line.m, line.b, line.product) == (3, 5, 1)
    assert line_eval(ctx, line, 2) == ctx.add(6, 5)


def test_bucket_gf7_unit():
    ctx = field(7)
    got = bucket(ctx, 1).lines
    want = {make_line(ctx, ctx.inv(m), m) for m in ctx.units}
    assert got == want
    assert len(got) == 6


def test_bucket_gf3():
    ctx = field(3)
    assert bucket(ctx, 1).lines == {make_line(ctx, 1, 1), make_line(ctx, 2, 2)}


def test_bucket_zero_gf7():
    lines = bucket(field(7), 0).lines
    assert len(lines) == 13
    assert all(l.product == 0 for l in lines)


def test_bucket_invariants():
    for q in (7, 8, 9):
        ctx = field(q)
        for g in ctx.units:
            lines = bucket(ctx, g).lines
            assert len(lines) == q - 1
            assert {l.m for l in lines} == set(ctx.units)
            assert all(l.product == g for l in lines)


def test_bucket_eval_figure_rows():
    ctx = field(7)
    assert bucket_eval(ctx, 4, 1).points == {2, 3, 4, 5}
    assert bucket_eval(ctx, 1, 0).points == set(ctx.units)
    assert bucket_eval(ctx, 1, 1).points == {1, 2, 5, 6}
    # the zero bucket contains every constant line, so its image is the field
    for a in ctx.elements:
        assert bucket_eval(ctx, 0, a).points == set(ctx.elements)
    # at alpha = 0 every nonzero bucket evaluates to the constant terms = units
    for g in ctx.units:
        assert bucket_eval(ctx, g, 0).points == set(ctx.units)


def test_b11_frozen():
    assert b11(field(5)) == {0, 2, 3}
    assert b11(field(3)) == {1, 2}
    assert b11(field(7)) == {1, 2, 5, 6}
    assert b11(field(8)) == {0, 2, 4, 7}
    assert b11(field(9)) == {0, 1, 2, 3, 6}


def test_b11_sizes_and_rejects():
    for q in SUPPORTED_Q + [81, 121, 125, 127, 128]:
        ctx = field(q)
        expect = (q + 1) // 2 if ctx.p > 2 else q // 2
        assert len(b11(ctx)) == expect
    for q in (2, 4):
        with pytest.raises(UnsupportedField):
            b11(field(q))


def test_b11_equals_bucket_eval():
    for q in (7, 8, 9, 13):
        ctx = field(q)
        assert b11(ctx) == bucket_eval(ctx, 1, 1).points


def test_h_line_is_scaled_g_line():
    for q in (7, 9):
        ctx = field(q)
        ss = build_sqrt_system(ctx)
        for g in omega_set(ctx).elements:
            r = ss.sqrt(g)
            for m in ctx.units:
                hl = h_line(ctx, ss, g, m)
                gl = g_line(ctx, m)
                assert hl.m == ctx.mul(r, gl.m)
                assert hl.b == ctx.mul(r, gl.b)
                assert hl.product == g


def test_relabel_frozen_example():
    ctx = field(7)
    ss = build_sqrt_system(ctx)
    out = relabel(ctx, ss, make_line(ctx, 5, 3), 4)
    assert (out.m, out.b) == (6, 6)


def test_relabel_identity_at_one():
    ctx = field(7)
    ss = build_sqrt_system(ctx)
    line = make_line(ctx, 5, 3)
    assert relabel(ctx, ss, line, 1) == line


def test_relabel_rejections():
    ctx = field(7)
    ss = build_sqrt_system(ctx)
    with pytest.raises(RegimeMismatch):
        relabel(ctx, ss, make_line(ctx, 5, 3), 3)  # 3 not a square mod 7
    with pytest.raises(RegimeMismatch):
        relabel(ctx, ss, make_line(ctx, 1, 3), 1)  # product 3 outside restricted set


def test_relabel_permutes_bucket():
    for q in (7, 8, 9):
        ctx = field(q)
        ss = build_sqrt_system(ctx)
        for g in omega_set(ctx).elements:
            lines = bucket(ctx, g).lines
            for a in omega_set(ctx).elements:
                image = {relabel(ctx, ss, l, a) for l in lines}
                assert image == lines


def test_relabel_evaluation_identity():
    # the relabelled line evaluated at alpha is sqrt(gamma)sqrt(alpha)(m + 1/m)
    for q in (7, 9):
        ctx = field(q)
        ss = build_sqrt_system(ctx)
        om = omega_set(ctx)
        for g in om.elements:
            for a in om.elements:
                scale = ctx.mul(ss.sqrt(g), ss.sqrt(a))
                for m in ctx.units:
                    line = h_line(ctx, ss, g, m)
                    moved = relabel(ctx, ss, line, a)
                    want = ctx.mul(scale, ctx.add(m, ctx.inv(m)))
                    assert line_eval(ctx, moved, a) == want


def test_scalar_evolution_identity_case():
    ctx = field(7)
    ss = build_sqrt_system(ctx)
    assert scalar_evolution(ctx, ss, 2, 4, 2, 4)


def test_scalar_evolution_exhaustive():
    for q in (7, 8, 9):
        ctx = field(q)
        ss = build_sqrt_system(ctx)
        om = omega_set(ctx).elements
        for g in om:
            for a in om:
                for d in om:
                    for be in om:
                        assert scalar_evolution(ctx, ss, g, a, d, be)


def test_scalar_evolution_rejects_outside():
    ctx = field(7)
    ss = build_sqrt_system(ctx)
    with pytest.raises(RegimeMismatch):
        scalar_evolution(ctx, ss, 3, 1, 1, 1)


def test_one_scaling_identity_small_fields():
    # B_gamma(alpha) = sqrt(gamma)sqrt(alpha) * B_1(1) on the restricted sets
    for q in [qq for qq in SUPPORTED_Q if qq <= 64]:
        ctx = field(q)
        ss = build_sqrt_system(ctx)
        base = b11(ctx)
        for g in omega_set(ctx).elements:
            for a in omega_set(ctx).elements:
                scale = ctx.mul(ss.sqrt(g), ss.sqrt(a))
                want = {ctx.mul(scale, y) for y in base}
                assert bucket_eval(ctx, g, a).points == want


def test_sqrt_pullback_identity_small_fields():
    # {alpha/m + m} = {sqrt(alpha)/m + sqrt(alpha)*m} over the restricted set
    for q in [qq for qq in SUPPORTED_Q if qq <= 64]:
        ctx = field(q)
        ss = build_sqrt_system(ctx)
        for a in omega_set(ctx).elements:
            r = ss.sqrt(a)
            lhs = {ctx.add(ctx.div(a, m), m) for m in ctx.units}
            rhs = {ctx.add(ctx.div(r, m), ctx.mul(r, m)) for m in ctx.units}
            assert lhs == rhs


def test_encode_examples():
    ctx = field(7)
    assert encode(ctx, (2, 3), (0, 1, 2)) == (2, 5, 1)
    assert encode(ctx, (0,), tuple(ctx.elements)) == (0,) * 7
    assert encode(ctx, (0, 1), tuple(ctx.elements)) == tuple(ctx.elements)


def test_encode_rejections():
    ctx = field(7)
    with pytest.raises(DuplicatePoints):
        encode(ctx, (1, 2), (0, 1, 1))
    with pytest.raises(PreconditionViolated):
        encode(ctx, (1, 2, 3), (0, 1))
