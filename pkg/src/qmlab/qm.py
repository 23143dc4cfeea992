"""Bit-leakage schemes for coefficient-product recovery, and their search.

A scheme fixes a server set S, a query schedule alpha_1..alpha_t (points in
S, repeats allowed) and per-query sets T_1..T_t (q-bit masks).  Each query
leaks one bit: 0 when the evaluation lands in T, 1 otherwise.  The decoder
(run_qm) keeps, for every candidate product gamma, the lines of product
gamma consistent with every leaked bit; the scheme is valid for a product
domain when the transcript always pins down the product uniquely.

Validity is equivalently a separation condition -- any two messages whose
products differ inside the domain must produce different transcripts.  For
search, the masks queried at one point matter only through the partition of
F_q they induce (b masks make at most 2**b cells, and any partition into at
most 2**b cells is b masks), so minimal bandwidth is found by branch and
bound over per-point partitions with graph-coloring feasibility checks,
ordered canonically so witnesses are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

from .errors import (
    BudgetExceeded,
    InvalidScheme,
    PreconditionViolated,
    RegimeMismatch,
)
from .galois import FieldCtx, mask_of
from .residues import SqrtSystem, omega_set
from .rscode import bucket, line_eval

QM = "QM"
MQM = "mQM"
APPENDIX = "Appendix"

SUCCESS = "success"
INVALID_TRANSCRIPT = "invalid_transcript"
FAIL = "fail"


@dataclass(frozen=True)
class LeakageScheme:
    ctx: FieldCtx
    k: int
    i: int
    j: int
    servers: frozenset
    schedule: tuple
    sets: tuple  # q-bit masks, one per schedule entry

    def __post_init__(self):
        object.__setattr__(self, "servers", frozenset(self.servers))
        object.__setattr__(self, "schedule", tuple(self.schedule))
        object.__setattr__(self, "sets", tuple(self.sets))
        q = self.ctx.q
        if self.k < 2:
            raise InvalidScheme("need dimension k >= 2")
        if not (0 <= self.i < self.k and 0 <= self.j < self.k and self.i != self.j):
            raise InvalidScheme("target indices must be distinct and < k")
        if len(self.schedule) != len(self.sets):
            raise InvalidScheme("schedule and sets must have equal length")
        if not all(0 <= a < q for a in self.servers):
            raise InvalidScheme("servers must be field elements")
        if not all(a in self.servers for a in self.schedule):
            raise InvalidScheme("every scheduled point must be a server")
        if not all(0 <= m < (1 << q) for m in self.sets):
            raise InvalidScheme("each leakage set must be a q-bit mask")

    @property
    def t(self) -> int:
        return len(self.schedule)


class QmOutcome(NamedTuple):
    kind: str  # SUCCESS | INVALID_TRANSCRIPT | FAIL
    gamma: int | None = None


def leak_bit(t_mask: int, x: int) -> int:
    """0 when x lies in the set, 1 otherwise."""
    return 0 if (t_mask >> x) & 1 else 1


def transcript(scheme: LeakageScheme, message) -> tuple:
    coeffs = tuple(message)
    if len(coeffs) != scheme.k:
        raise PreconditionViolated(f"message must have {scheme.k} coefficients")
    ctx = scheme.ctx
    return tuple(
        leak_bit(t_mask, ctx.poly_eval(coeffs, a))
        for a, t_mask in zip(scheme.schedule, scheme.sets)
    )


def run_qm(scheme: LeakageScheme, bits, product_domain=None) -> QmOutcome:
    """Replay a transcript against every candidate product bucket.

    Keeps, per product gamma in the domain (default: the whole field), the
    lines consistent with each bit: bit 0 keeps lines evaluating into T, bit
    1 keeps the rest.  Exactly one surviving bucket is a success, none is an
    invalid transcript, more than one is a failure.
    """
    if scheme.k != 2:
        raise PreconditionViolated("transcript replay works on dimension-2 schemes")
    bits = tuple(bits)
    if len(bits) != scheme.t:
        raise PreconditionViolated("transcript length must match the schedule")
    ctx = scheme.ctx
    domain = tuple(ctx.elements) if product_domain is None else tuple(product_domain)
    survivors = {g: list(bucket(ctx, g).lines) for g in domain}
    for b, a, t_mask in zip(bits, scheme.schedule, scheme.sets):
        keep_inside = b == 0
        for g in domain:
            survivors[g] = [
                line
                for line in survivors[g]
                if (((t_mask >> line_eval(ctx, line, a)) & 1) == 1) == keep_inside
            ]
    alive = [g for g in domain if survivors[g]]
    if len(alive) == 1:
        return QmOutcome(SUCCESS, alive[0])
    if not alive:
        return QmOutcome(INVALID_TRANSCRIPT)
    return QmOutcome(FAIL)


def _domain_messages(ctx: FieldCtx, product_domain):
    """All dimension-2 messages whose coefficient product is in the domain."""
    dom = frozenset(product_domain)
    out = []
    for c0 in ctx.elements:
        for c1 in ctx.elements:
            g = ctx.mul(c0, c1)
            if g in dom:
                out.append(((c0, c1), g))
    return out


def verify_scheme(scheme: LeakageScheme, product_domain) -> bool:
    """True iff the transcript determines the product over the given domain.

    Uses the separation criterion: messages with different in-domain
    products must never share a transcript.  That is equivalent to run_qm
    returning Success with the right product on every in-domain message.
    """
    if scheme.k != 2:
        raise PreconditionViolated("verification works on dimension-2 schemes")
    seen: dict[tuple, int] = {}
    for coeffs, g in _domain_messages(scheme.ctx, product_domain):
        bits = transcript(scheme, coeffs)
        if seen.setdefault(bits, g) != g:
            return False
    return True


def mqm_check(scheme: LeakageScheme) -> bool:
    """Validity in the restricted regime: all queried points and the product
    domain live in the restricted set."""
    if scheme.k != 2 or {scheme.i, scheme.j} != {0, 1}:
        raise PreconditionViolated("restricted regime is defined for k=2, targets {0,1}")
    om = omega_set(scheme.ctx)
    if not all(a in om for a in scheme.schedule):
        return False
    return verify_scheme(scheme, om.elements)


def convert_eliminator(ctx: FieldCtx, sqrt_system: SqrtSystem, t_mask: int, alpha: int) -> frozenset:
    """Translate a leakage set at alpha into an eliminator V at the reference
    point: V collects sqrt(gamma)*(m + 1/m) over every product-gamma line
    whose evaluation at alpha lands in the set.

    By the relabel identity this equals (1/sqrt(alpha)) times the evaluations
    at alpha of the relabelled qualifying lines, so a line h with
    h(alpha) in T always has its reference value m + 1/m inside
    (1/sqrt(gamma)) * V.
    """
    om = omega_set(ctx)
    if alpha not in om:
        raise RegimeMismatch(f"{alpha} outside the restricted set")
    out = set()
    for g in om.elements:
        r = sqrt_system.sqrt(g)
        for m in ctx.units:
            value_at_alpha = ctx.mul(r, ctx.add(ctx.div(alpha, m), m))
            if (t_mask >> value_at_alpha) & 1:
                out.add(ctx.mul(r, ctx.add(m, ctx.inv(m))))
    return frozenset(out)


def reduce_k_to_2(ctx: FieldCtx, k: int, i: int, j: int, alpha: int) -> tuple:
    """Local transformation turning a message supported on {i, j} into a line.

    The server at alpha rescales its symbol by alpha^(-i) and reads it as a
    degree-1 evaluation at beta = alpha^(j-i); returns (rescale, beta, j-i).
    """
    if k <= 2:
        raise PreconditionViolated("reduction applies to dimensions above 2")
    if not 0 <= i < j < k:
        raise PreconditionViolated("need 0 <= i < j < k")
    if alpha == 0:
        raise PreconditionViolated("the reduction rescales by a power of alpha")
    r = j - i
    return ctx.pow(alpha, -i), ctx.pow(alpha, r), r


def reachable_betas(ctx: FieldCtx, r: int) -> frozenset:
    """Image of x -> x^r on the units: the relabeled points the reduction can hit."""
    return frozenset(ctx.pow(x, r) for x in ctx.units)


_SEARCH_Q_LIMIT = 11


def _mode_domain(ctx: FieldCtx, mode: str):
    if mode == QM:
        return tuple(ctx.elements)
    if mode == APPENDIX:
        return tuple(ctx.units)
    if mode == MQM:
        return omega_set(ctx).elements
    raise PreconditionViolated(f"unknown search mode {mode!r}")


@lru_cache(maxsize=None)
def _separation_problem(ctx: FieldCtx, mode: str, servers: frozenset):
    """Split demands of the cross-bucket message pairs, deduplicated.

    Each pair demands that the evaluations at some queried point end up in
    different partition cells; its options are the (point, value, value)
    edges where the two evaluations differ.  Pairs sharing an option
    signature are one constraint, and a constraint whose options contain
    another's is dropped (splitting the smaller set splits both).  Returns
    (pair count, points in canonical order, constraints, blocked) where
    blocked flags a pair with no options at all.
    """
    domain = _mode_domain(ctx, mode)
    messages = _domain_messages(ctx, domain)
    alphas = sorted(servers)
    if mode == MQM:
        om = omega_set(ctx)
        alphas = [a for a in alphas if a in om]
    evals = [
        tuple(ctx.poly_eval(coeffs, a) for coeffs, _ in messages) for a in alphas
    ]
    n_pairs = 0
    blocked = False
    sigs: set[tuple] = set()
    for x in range(len(messages)):
        gx = messages[x][1]
        for y in range(x + 1, len(messages)):
            if gx == messages[y][1]:
                continue
            n_pairs += 1
            options = []
            for ai in range(len(alphas)):
                u, v = evals[ai][x], evals[ai][y]
                if u != v:
                    options.append((ai, u, v) if u < v else (ai, v, u))
            if options:
                sigs.add(tuple(options))
            else:
                blocked = True
    kept: list[tuple] = []
    kept_sets: list[frozenset] = []
    for sig in sorted(sigs, key=lambda s: (len(s), s)):
        as_set = frozenset(sig)
        if any(prev <= as_set for prev in kept_sets):
            continue
        kept.append(sig)
        kept_sets.append(as_set)
    return n_pairs, tuple(alphas), tuple(kept), blocked


def _color_graph(q: int, adj, colors: int):
    """First proper coloring (smallest color per vertex in encoding order)
    of the graph given by adjacency bitmasks, or None when colors are few."""
    assign = [0] * q

    def place(v: int) -> bool:
        if v == q:
            return True
        banned = 0
        m = adj[v] & ((1 << v) - 1)
        while m:
            low = m & -m
            banned |= 1 << assign[low.bit_length() - 1]
            m ^= low
        for c in range(colors):
            if not (banned >> c) & 1:
                assign[v] = c
                if place(v + 1):
                    return True
        return False

    return tuple(assign) if place(0) else None


def search_min_bandwidth(
    ctx: FieldCtx,
    mode: str,
    servers,
    t_max: int | None = None,
    budget: int = 10**6,
) -> Optional[tuple]:
    """Minimum number of leaked bits admitting a valid scheme, with witness.

    Spends b_alpha bits per queried point (sum ascending) and asks whether
    every cross-bucket pair can be split somewhere: committing a pair to a
    point adds a must-split edge there, and a point with b bits can honor
    its edges iff they are 2**b-colorable.  Returns (t, scheme) or None when
    no scheme exists within t_max; raises BudgetExceeded after `budget`
    search nodes.
    """
    if ctx.q > _SEARCH_Q_LIMIT:
        raise PreconditionViolated(f"exhaustive search capped at q <= {_SEARCH_Q_LIMIT}")
    servers = frozenset(servers)
    if not all(0 <= a < ctx.q for a in servers):
        raise PreconditionViolated("servers must be field elements")
    if t_max is None:
        t_max = 2 * ctx.q
    q = ctx.q
    domain = _mode_domain(ctx, mode)
    n_pairs, alphas, constraints, blocked = _separation_problem(ctx, mode, servers)
    if blocked:
        return None  # some pair no query separates: no bandwidth suffices

    def finish(bits, colorings) -> tuple:
        picked = []
        for ai, a in enumerate(alphas):
            for w in range(bits[ai]):
                m = 0
                for v in range(q):
                    if (colorings[ai][v] >> w) & 1:
                        m |= 1 << v
                picked.append((a, m))
        picked.sort()
        scheme = LeakageScheme(
            ctx,
            2,
            0,
            1,
            servers,
            tuple(a for a, _ in picked),
            tuple(m for _, m in picked),
        )
        assert verify_scheme(scheme, domain)
        if mode == MQM:
            assert mqm_check(scheme)
        return len(picked), scheme

    if not constraints:
        return finish((0,) * len(alphas), ((0,) * q,) * len(alphas))
    if not alphas:
        return None

    nodes = 0
    adj = [[0] * q for _ in alphas]
    color_cache: dict[tuple, bool] = {}

    def colorable(ai: int, colors: int) -> bool:
        if colors >= q:
            return True
        if max(row.bit_count() for row in adj[ai]) < colors:
            return True  # greedy coloring needs at most max degree + 1
        key = (ai, colors, tuple(adj[ai]))
        got = color_cache.get(key)
        if got is None:
            got = _color_graph(q, adj[ai], colors) is not None
            color_cache[key] = got
        return got

    def solve(caps) -> bool:
        """Commit each constraint to a split point, backtracking on color
        budgets; on success the chosen edges are left in `adj`."""
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"search expanded more than {budget} nodes")
        branch = None
        for sig in constraints:
            if any((adj[ai][u] >> v) & 1 for ai, u, v in sig):
                continue  # already split
            viable = []
            for ai, u, v in sig:
                if caps[ai] == 1:
                    continue
                adj[ai][u] |= 1 << v
                adj[ai][v] |= 1 << u
                ok = colorable(ai, caps[ai])
                adj[ai][u] ^= 1 << v
                adj[ai][v] ^= 1 << u
                if ok:
                    viable.append((ai, u, v))
            if not viable:
                return False
            if branch is None or len(viable) < len(branch):
                branch = viable
                if len(viable) == 1:
                    break
        if branch is None:
            return True
        for ai, u, v in branch:
            adj[ai][u] |= 1 << v
            adj[ai][v] |= 1 << u
            if solve(caps):
                return True
            adj[ai][u] ^= 1 << v
            adj[ai][v] ^= 1 << u
        return False

    def compositions(total: int, parts: int, cap: int):
        if parts == 1:
            if total <= cap:
                yield (total,)
            return
        for first in range(min(total, cap) + 1):
            for rest in compositions(total - first, parts - 1, cap):
                yield (first,) + rest

    cap = max(1, (q - 1).bit_length())  # a partition into singletons splits all
    for t in range(t_max + 1):
        for bits in compositions(t, len(alphas), cap):
            for row in adj:
                for v in range(q):
                    row[v] = 0
            caps = tuple(1 << b for b in bits)
            if solve(caps):
                colorings = [
                    _color_graph(q, adj[ai], caps[ai]) for ai in range(len(alphas))
                ]
                return finish(bits, colorings)
    return None
