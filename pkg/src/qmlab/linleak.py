"""Linear one-symbol probes always collide below full download.

Every prime-subfield-linear probe of a stored evaluation is a trace
functional x -> trace(gamma*x).  Writing field elements in digit
coordinates turns 2e-1 such probes of a line ux+v into 2e-1 linear
conditions on the 2e digits of (u, v), so some nonzero line has an
all-zero probe transcript.  Splitting that line into two addends with
different coefficient products yields two codewords no reconstruction
function can tell apart, which is the whole impossibility argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import PreconditionViolated
from .galois import FieldCtx


@dataclass(frozen=True)
class TraceQuery:
    alpha: int
    gamma: int

    def __post_init__(self):
        if self.alpha == 0:
            raise PreconditionViolated("query point must be a unit")


def trace_leak(ctx: FieldCtx, query: TraceQuery, x: int) -> int:
    """The leaked prime-subfield symbol trace(gamma * x)."""
    return ctx.trace(ctx.mul(query.gamma, x))


@dataclass(frozen=True)
class FrobeniusSystem:
    """Digit-coordinate view of the field: psi writes an element over the
    power basis 1, x, ..., x^{e-1}, phi(a) is the matrix multiplying by a in
    those coordinates, and the Frobenius matrix P satisfies
    P^w psi(x) = psi(x^(p^w))."""

    ctx: FieldCtx
    frobenius_matrix: tuple

    def psi(self, a: int) -> tuple:
        return tuple(self.ctx.digits(a))

    def element(self, digits) -> int:
        return self.ctx.from_digits(digits)

    def phi(self, a: int) -> tuple:
        ctx = self.ctx
        cols = [self.psi(ctx.mul(a, ctx.p**w)) for w in range(ctx.e)]
        return tuple(tuple(col[r] for col in cols) for r in range(ctx.e))

    def trace_row(self, y: int) -> tuple:
        """Row 0 of sum_w phi(y^(p^w)) P^w: the digit functional whose value
        at psi(x) is trace(y*x), since traces sit in digit 0 of this basis."""
        ctx = self.ctx
        row = [0] * ctx.e
        power = _identity(ctx.e)
        for w in range(ctx.e):
            block = _mat_mul(self.phi(ctx.frobenius(y, w)), power, ctx.p)
            row = [(r + b) % ctx.p for r, b in zip(row, block[0])]
            power = _mat_mul(self.frobenius_matrix, power, ctx.p)
        return tuple(row)


def _identity(e: int) -> tuple:
    return tuple(tuple(int(r == c) for c in range(e)) for r in range(e))


def _mat_mul(a, b, p: int) -> tuple:
    n = len(a)
    return tuple(
        tuple(sum(a[r][k] * b[k][c] for k in range(n)) % p for c in range(n))
        for r in range(n)
    )


def _mat_vec(a, x, p: int) -> tuple:
    return tuple(sum(row[k] * x[k] for k in range(len(x))) % p for row in a)


@lru_cache(maxsize=None)
def build_frobenius_system(ctx: FieldCtx) -> FrobeniusSystem:
    cols = [ctx.digits(ctx.frobenius(ctx.p**w)) for w in range(ctx.e)]
    matrix = tuple(tuple(col[r] for col in cols) for r in range(ctx.e))
    return FrobeniusSystem(ctx, matrix)


def _kernel_vector(rows, width: int, p: int) -> tuple:
    """First kernel vector of the row system in reduced echelon order:
    unit weight on the first free column, then the head digit scaled to 1."""
    mat = [list(r) for r in rows]
    pivots = []
    rank = 0
    for col in range(width):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = pow(mat[rank][col], p - 2, p)
        mat[rank] = [x * inv % p for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                factor = mat[r][col]
                mat[r] = [(x - factor * y) % p for x, y in zip(mat[r], mat[rank])]
        pivots.append(col)
        rank += 1
    free = next(c for c in range(width) if c not in pivots)
    vec = [0] * width
    vec[free] = 1
    for row, col in zip(mat, pivots):
        vec[col] = -row[free] % p
    head = next(x for x in vec if x)
    scale = pow(head, p - 2, p)
    return tuple(x * scale % p for x in vec)


def zero_trace_line(ctx: FieldCtx, queries) -> tuple:
    """A nonzero line ux + v whose every trace probe reads zero.

    The probes give 2e-1 digit-linear conditions on the 2e digits of
    (u, v), so the kernel is nontrivial; the returned line is the canonical
    kernel vector and is verified against every probe before returning.
    """
    queries = tuple(queries)
    e = ctx.e
    if len(queries) != 2 * e - 1:
        raise PreconditionViolated(f"need exactly {2 * e - 1} queries")
    system = build_frobenius_system(ctx)
    rows = [
        system.trace_row(ctx.mul(qy.gamma, qy.alpha)) + system.trace_row(qy.gamma)
        for qy in queries
    ]
    vec = _kernel_vector(rows, 2 * e, ctx.p)
    u = system.element(vec[:e])
    v = system.element(vec[e:])
    assert (u, v) != (0, 0)
    for qy in queries:
        assert trace_leak(ctx, qy, ctx.add(ctx.mul(u, qy.alpha), v)) == 0
    return u, v


def decompose(ctx: FieldCtx, u: int, v: int) -> tuple:
    """Split (u, v) as u = m + m', v = b + b' with mb != m'b'.

    Scans the shared head value m = b = c upward from zero; c = 0 works
    whenever uv != 0 and c = 1 covers the remaining cases, so the scan is
    total.
    """
    if u == 0 and v == 0:
        raise PreconditionViolated("need a nonzero line to split")
    for c in ctx.elements:
        m2, b2 = ctx.sub(u, c), ctx.sub(v, c)
        if ctx.mul(c, c) != ctx.mul(m2, b2):
            return c, m2, c, b2
    raise AssertionError(f"no separating split for ({u}, {v}) over GF({ctx.q})")


def transcript_collision(ctx: FieldCtx, queries) -> tuple:
    """Two lines with identical probe transcripts but different coefficient
    products, returned as little-endian coefficient pairs."""
    queries = tuple(queries)
    u, v = zero_trace_line(ctx, queries)
    m, m2, b, b2 = decompose(ctx, u, v)
    f = (b, m)
    ell = (ctx.neg(b2), ctx.neg(m2))
    for qy in queries:
        assert trace_leak(ctx, qy, ctx.poly_eval(f, qy.alpha)) == trace_leak(
            ctx, qy, ctx.poly_eval(ell, qy.alpha)
        )
    assert ctx.mul(f[0], f[1]) != ctx.mul(ell[0], ell[1])
    return f, ell


def linear_impossibility_check(ctx: FieldCtx, k: int, i: int, j: int, queries) -> bool:
    """True when the queries admit a verified collision pair of degree-(k-1)
    codewords agreeing on every probe but differing in the i*j coefficient
    product, so no reconstruction function exists for that product.

    Higher dimensions reduce to lines: rescaling a stored evaluation by
    alpha^(-i) turns the i and j coefficients into the intercept and slope
    of a line in beta = alpha^(j-i), and folding alpha^i into gamma keeps
    the probes identical.
    """
    queries = tuple(queries)
    if len(queries) != 2 * ctx.e - 1:
        raise PreconditionViolated(f"need exactly {2 * ctx.e - 1} queries")
    if not (0 <= i < k and 0 <= j < k) or i == j:
        raise PreconditionViolated("need two distinct coefficient targets")
    r = (j - i) % (ctx.q - 1)
    lifted = tuple(
        TraceQuery(ctx.pow(qy.alpha, r), ctx.mul(qy.gamma, ctx.pow(qy.alpha, i)))
        for qy in queries
    )
    f, ell = transcript_collision(ctx, lifted)
    poly_f, poly_ell = [0] * k, [0] * k
    poly_f[i], poly_f[j] = f[0], f[1]
    poly_ell[i], poly_ell[j] = ell[0], ell[1]
    transcripts_match = all(
        trace_leak(ctx, qy, ctx.poly_eval(poly_f, qy.alpha))
        == trace_leak(ctx, qy, ctx.poly_eval(poly_ell, qy.alpha))
        for qy in queries
    )
    products_differ = ctx.mul(poly_f[i], poly_f[j]) != ctx.mul(poly_ell[i], poly_ell[j])
    return transcripts_match and products_differ
