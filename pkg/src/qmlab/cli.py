"""Command-line front door: subcommand dispatch, canonical JSON reports, and
the batch verification suite.

Every subcommand builds a RunReport -- a payload plus named checks, each
pass/fail with a witness on failure.  Exit status is 0 when every check
passed, 1 when any failed, 2 on usage errors or rejected inputs (bad
fields, malformed scheme files, blown search budgets).  JSON output is
canonical: sorted keys, compact separators, floats rounded to six decimals,
non-finite numbers as null, so identical invocations give byte-identical
reports; wall time is printed in text mode only for the same reason.

`suite` composes the per-module batteries over every supported field up to
--qmax.  Setting QMLAB_THREADS above 1 runs independent checks in a thread
pool; the report order is fixed by construction order, not completion.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .charsum import artin_schreier_solvable, b11_trace_kernel_check, complete_char_sum
from .errors import NoPairExists, PreconditionViolated, QmLabError, SchemaError
from .errors import UnsupportedField
from .galois import (
    FieldCtx,
    field,
    field_pe,
    find_primitive,
    find_primitive_zero_inv_trace,
    mask_elems,
    mask_from_hex,
    mask_of,
    mask_to_hex,
)
from .linleak import TraceQuery, linear_impossibility_check, transcript_collision
from .pqm import (
    GameConfig,
    adversarial_game,
    bandwidth_bound,
    mqm_to_pqm,
    play_game,
    replay_transcript,
    run_pqm,
)
from .qm import (
    APPENDIX,
    MQM,
    QM,
    SUCCESS,
    InvalidScheme,
    LeakageScheme,
    leak_bit,
    mqm_check,
    search_min_bandwidth,
    transcript,
    verify_scheme,
)
from .residues import (
    build_sqrt_system,
    minus_one_is_residue,
    omega_set,
    quadratic_character,
    regime_of,
    scaled_pair,
    scaled_pair_union_size,
)
from .rscode import b11, bucket, bucket_eval, scalar_evolution
from .shamir7 import download_cost, figure1_table, gf7_scheme, one_bit_leak, verify_gf7

_MODES = {"qm": QM, "mqm": MQM, "appendix": APPENDIX}
_EXHAUSTIVE_LIMIT = 10**6


# ---------------------------------------------------------------- reports


def _plain(obj):
    """Rewrite a payload into deterministic JSON-ready values."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, float):
        return round(obj, 6) if math.isfinite(obj) else None
    if isinstance(obj, int):
        return obj
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [_plain(v) for v in sorted(obj)]
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


def _text_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}" if math.isfinite(v) else str(v)
    return canonical_json(v)


def _check(name: str, ok, **extra) -> dict:
    out = {"name": name, "pass": bool(ok)}
    out.update(extra)
    return out


@dataclass
class RunReport:
    command: str
    payload: dict
    checks: list
    text_body: list | None = None
    started: float = 0.0

    def ok(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_json(self) -> str:
        return canonical_json(
            {"command": self.command, **self.payload, "checks": self.checks, "ok": self.ok()}
        )

    def to_text(self) -> str:
        lines = [f"qmlab {self.command}"]
        if self.text_body:
            lines += self.text_body
        else:
            for key in sorted(self.payload):
                lines.append(f"{key} = {_text_value(self.payload[key])}")
        for c in self.checks:
            extra = {k: v for k, v in c.items() if k not in ("name", "pass")}
            suffix = f"  {canonical_json(extra)}" if extra else ""
            lines.append(f"[{'ok' if c['pass'] else 'FAIL'}] {c['name']}{suffix}")
        if self.checks:
            good = sum(1 for c in self.checks if c["pass"])
            verdict = "all checks passed" if self.ok() else "CHECKS FAILED"
            lines.append(f"{verdict} ({good}/{len(self.checks)})")
        lines.append(f"wall time {time.perf_counter() - self.started:.3f}s")
        return "\n".join(lines)


# ---------------------------------------------------------------- scheme io


def _require(obj: dict, key: str, kinds, where: str):
    if key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    val = obj[key]
    if not isinstance(val, kinds):
        raise SchemaError(f"{where}: field {key!r} has the wrong type")
    return val


def _field_from_obj(fd, where: str) -> FieldCtx:
    if not isinstance(fd, dict):
        raise SchemaError(f"{where}: expected a field descriptor object")
    p = _require(fd, "p", int, where)
    e = _require(fd, "e", int, where)
    if e > 1 and "irreducible" not in fd:
        raise SchemaError(f"{where}: missing field 'irreducible' (required for e > 1)")
    try:
        return FieldCtx(p, e, fd.get("irreducible"))
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def scheme_to_obj(scheme: LeakageScheme) -> dict:
    q = scheme.ctx.q
    return {
        "field": scheme.ctx.descriptor(),
        "k": scheme.k,
        "i": scheme.i,
        "j": scheme.j,
        "servers": sorted(scheme.servers),
        "schedule": list(scheme.schedule),
        "sets": [mask_to_hex(m, q) for m in scheme.sets],
    }


def scheme_from_obj(obj, where: str = "scheme") -> LeakageScheme:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected a scheme object")
    ctx = _field_from_obj(_require(obj, "field", dict, where), f"{where}.field")
    k = _require(obj, "k", int, where)
    i = _require(obj, "i", int, where)
    j = _require(obj, "j", int, where)
    servers = _require(obj, "servers", list, where)
    schedule = _require(obj, "schedule", list, where)
    if not all(isinstance(x, int) for x in servers + schedule):
        raise SchemaError(f"{where}: servers and schedule must hold integers")
    sets = []
    for idx, text in enumerate(_require(obj, "sets", list, where)):
        if not isinstance(text, str):
            raise SchemaError(f"{where}.sets[{idx}]: expected a hex mask string")
        try:
            sets.append(mask_from_hex(text, ctx.q))
        except ValueError as exc:
            raise SchemaError(f"{where}.sets[{idx}]: {exc}") from None
    try:
        return LeakageScheme(ctx, k, i, j, frozenset(servers), tuple(schedule), tuple(sets))
    except InvalidScheme as exc:
        raise SchemaError(f"{where}: {exc}") from None


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def read_scheme(path: str) -> LeakageScheme:
    return scheme_from_obj(_load_json(path), where=path)


# ---------------------------------------------------------------- helpers


def _csv_ints(text: str) -> list:
    return [int(x) for x in text.split(",") if x != ""]


def _field_from_args(args) -> FieldCtx:
    if getattr(args, "p", None):
        return field_pe(args.p, getattr(args, "e", None) or 1)
    if getattr(args, "q", None) is None:
        raise PreconditionViolated("select a field with --q or --p/--e")
    return field(args.q)


def _grid_lines(ctx: FieldCtx, cells: dict) -> list:
    """cells maps (point, product) to an iterable of field elements."""
    text = {
        key: "{" + ",".join(str(x) for x in sorted(val)) + "}"
        for key, val in cells.items()
    }
    labels = [str(g) for g in ctx.elements]
    width = max(max(len(v) for v in text.values()), max(len(l) for l in labels))
    lines = ["evaluation point (rows) by coefficient product (columns)"]
    lines.append("     " + " ".join(l.rjust(width) for l in labels))
    for a in ctx.elements:
        row = " ".join(text[(a, g)].rjust(width) for g in ctx.elements)
        lines.append(f"{a:>4} " + row)
    return lines


def _collision_witness(scheme: LeakageScheme, domain) -> dict:
    dom = frozenset(domain)
    ctx = scheme.ctx
    seen = {}
    for c0 in ctx.elements:
        for c1 in ctx.elements:
            g = ctx.mul(c0, c1)
            if g not in dom:
                continue
            bits = transcript(scheme, (c0, c1))
            prev = seen.setdefault(bits, ((c0, c1), g))
            if prev[1] != g:
                return {
                    "message_a": list(prev[0]),
                    "message_b": [c0, c1],
                    "products": [prev[1], g],
                    "transcript": list(bits),
                }
    raise AssertionError("no transcript collision found")  # caller saw one


# ---------------------------------------------------------------- commands


def cmd_field(args) -> RunReport:
    ctx = _field_from_args(args)
    payload = {
        "field": ctx.descriptor(),
        "q": ctx.q,
        "primitive": find_primitive(ctx),
    }
    return RunReport("field", payload, [])


def cmd_residues(args) -> RunReport:
    ctx = _field_from_args(args)
    om = omega_set(ctx)
    payload = {
        "field": ctx.descriptor(),
        "q": ctx.q,
        "regime": regime_of(ctx),
        "omega": sorted(om.elements),
    }
    try:
        pair = scaled_pair(ctx)
    except NoPairExists as exc:
        squares = sorted(x for x in ctx.units if quadratic_character(ctx, x) == 1)
        payload.update({"pair": None, "sqrt": None, "union_sizes": None})
        fail = _check(
            "scaled-pair-exists",
            False,
            note=str(exc),
            counterexample={"b11_star": sorted(b11(ctx) - {0}), "squares": squares},
        )
        return RunReport("residues", payload, [fail])
    ss = build_sqrt_system(ctx)
    expected = ctx.q - 3 if ctx.p > 2 else ctx.q - 4
    sizes = {g: scaled_pair_union_size(ctx, ss, pair, g) for g in om.elements}
    bad = {str(g): n for g, n in sorted(sizes.items()) if n != expected}
    payload.update(
        {
            "pair": [pair.a, pair.b],
            "sqrt": {str(g): r for g, r in sorted(ss.root.items())},
            "union_sizes": {str(g): n for g, n in sorted(sizes.items())},
            "expected_union": expected,
        }
    )
    checks = [
        _check("scaled-pair-exists", True, pair=[pair.a, pair.b]),
        _check("union-sizes", not bad, **({"counterexample": bad} if bad else {})),
    ]
    return RunReport("residues", payload, checks)


def cmd_charsum(args) -> RunReport:
    ctx = _field_from_args(args)
    report = complete_char_sum(ctx, tuple(args.poly))
    payload = {
        "field": ctx.descriptor(),
        "q": ctx.q,
        "poly": list(report.poly),
        "value": report.value,
        "bound": report.bound,
        "within_bound": report.within_bound,
        "square_free": report.square_free,
    }
    ok = report.within_bound or not report.square_free
    checks = [_check("weil-bound", ok, value=report.value, bound=report.bound)]
    return RunReport("charsum", payload, checks)


def cmd_buckets(args) -> RunReport:
    ctx = _field_from_args(args)
    cells = {
        (a, g): bucket_eval(ctx, g, a).points
        for a in ctx.elements
        for g in ctx.elements
    }
    payload = {
        "field": ctx.descriptor(),
        "q": ctx.q,
        "table": {
            str(a): {str(g): sorted(cells[(a, g)]) for g in ctx.elements}
            for a in ctx.elements
        },
    }
    return RunReport("buckets", payload, [], text_body=_grid_lines(ctx, cells))


def cmd_qm_verify(args) -> RunReport:
    scheme = read_scheme(args.scheme)
    ctx = scheme.ctx
    checks = []
    if args.domain == "all":
        domain = tuple(ctx.elements)
    elif args.domain == "nonzero":
        domain = tuple(ctx.units)
    else:
        om = omega_set(ctx)
        domain = om.elements
        off = [a for a in scheme.schedule if a not in om]
        checks.append(
            _check(
                "schedule-restricted", not off, **({"counterexample": off} if off else {})
            )
        )
    ok = verify_scheme(scheme, domain)
    entry = _check("transcript-separates-products", ok, domain=args.domain)
    if not ok:
        entry["counterexample"] = _collision_witness(scheme, domain)
    checks.append(entry)
    payload = {
        "field": ctx.descriptor(),
        "q": ctx.q,
        "t": scheme.t,
        "domain": args.domain,
        "scheme": scheme_to_obj(scheme),
    }
    return RunReport("qm verify", payload, checks)


def cmd_qm_search(args) -> RunReport:
    ctx = _field_from_args(args)
    servers = frozenset(args.servers) if args.servers else frozenset(ctx.elements)
    got = search_min_bandwidth(
        ctx, _MODES[args.mode], servers, t_max=args.tmax, budget=args.budget
    )
    payload = {
        "field": ctx.descriptor(),
        "q": ctx.q,
        "mode": args.mode,
        "servers": sorted(servers),
        "found": got is not None,
    }
    if got is None:
        checks = [_check("scheme-found", False, note="no scheme within --tmax")]
    else:
        t, scheme = got
        payload["t"] = t
        payload["scheme"] = scheme_to_obj(scheme)
        checks = [_check("scheme-found", True, t=t)]
    return RunReport("qm search", payload, checks)


def cmd_qm_convert(args) -> RunReport:
    scheme = read_scheme(args.scheme)
    v_seq = mqm_to_pqm(scheme)
    payload = {
        "field": scheme.ctx.descriptor(),
        "q": scheme.ctx.q,
        "v_seq": [sorted(v) for v in v_seq],
    }
    return RunReport("qm convert", payload, [])


def cmd_pqm_run(args) -> RunReport:
    obj = _load_json(args.v_file)
    if not isinstance(obj, dict) or "v_seq" not in obj:
        raise SchemaError(f"{args.v_file}: missing field 'v_seq'")
    if "field" in obj:
        ctx = _field_from_obj(obj["field"], f"{args.v_file}.field")
    elif args.q:
        ctx = field(args.q)
    else:
        raise SchemaError(f"{args.v_file}: no field descriptor; pass --q")
    v_seq = []
    for idx, entry in enumerate(obj["v_seq"]):
        if not isinstance(entry, list) or not all(
            isinstance(x, int) and 0 <= x < ctx.q for x in entry
        ):
            raise SchemaError(f"{args.v_file}.v_seq[{idx}]: expected field elements")
        v_seq.append(frozenset(entry))
    outcome, state = run_pqm(
        ctx, build_sqrt_system(ctx), tuple(v_seq), tuple(args.transcript)
    )
    alive = state.nonempty()
    payload = {
        "field": ctx.descriptor(),
        "q": ctx.q,
        "outcome": outcome,
        "rounds": state.rounds,
        "survivors": list(state.history),
        "classes_left": alive,
    }
    entry = _check("at-most-one-class-left", outcome == SUCCESS)
    if outcome != SUCCESS:
        entry["counterexample"] = {"classes_left": alive}
    return RunReport("pqm run", payload, [entry])


def cmd_game(args) -> RunReport:
    ctx = _field_from_args(args)
    v_seq = ()
    if getattr(args, "v_file", None):
        obj = _load_json(args.v_file)
        if not isinstance(obj, dict) or "v_seq" not in obj:
            raise SchemaError(f"{args.v_file}: missing field 'v_seq'")
        v_seq = tuple(frozenset(v) for v in obj["v_seq"])
    config = GameConfig(
        ctx,
        args.strategy,
        seed=args.seed,
        max_rounds=args.max_rounds,
        v_seq=v_seq,
    )
    record = play_game(config)
    floor = bandwidth_bound(ctx).integer_round_bound
    payload = {"field": ctx.descriptor(), "integer_round_bound": floor, **record}
    checks = [
        _check(
            "rounds-at-least-floor",
            record["rounds"] >= floor,
            floor=floor,
            rounds_played=record["rounds_played"],
        )
    ]
    return RunReport("game", payload, checks)


def cmd_bound(args) -> RunReport:
    ctx = _field_from_args(args)
    rep = bandwidth_bound(ctx)
    payload = {
        "field": ctx.descriptor(),
        "q": rep.q,
        "p": rep.p,
        "e": rep.e,
        "real_bound": rep.real_bound,
        "integer_round_bound": rep.integer_round_bound,
    }
    return RunReport("bound", payload, [])


def cmd_linleak_check(args) -> RunReport:
    ctx = _field_from_args(args)
    t = 2 * ctx.e - 1
    if args.exhaustive:
        space = [TraceQuery(a, g) for a in ctx.units for g in ctx.elements]
        if len(space) ** t > _EXHAUSTIVE_LIMIT:
            raise PreconditionViolated(
                f"{len(space) ** t} query tuples; use --samples for GF({ctx.q})"
            )
        tuples = itertools.product(space, repeat=t)
        mode = "exhaustive"
    else:
        rng = random.Random(args.seed)
        tuples = [
            tuple(
                TraceQuery(rng.randrange(1, ctx.q), rng.randrange(ctx.q))
                for _ in range(t)
            )
            for _ in range(args.samples)
        ]
        mode = "sampled"
    count = verified = 0
    witness = failing = None
    for tup in tuples:
        count += 1
        ok = linear_impossibility_check(ctx, args.k, args.i, args.j, tup)
        verified += ok
        if ok and witness is None:
            f, ell = transcript_collision(ctx, tup)
            witness = {
                "queries": [[qy.alpha, qy.gamma] for qy in tup],
                "f": list(f),
                "ell": list(ell),
            }
        if not ok and failing is None:
            failing = {"queries": [[qy.alpha, qy.gamma] for qy in tup]}
    payload = {
        "field": ctx.descriptor(),
        "q": ctx.q,
        "t": t,
        "k": args.k,
        "i": args.i,
        "j": args.j,
        "mode": mode,
        "count": count,
        "verified": verified,
        "witness": witness,
    }
    entry = _check("all-collisions-verify", verified == count, count=count)
    if failing is not None:
        entry["counterexample"] = failing
    return RunReport("linleak check", payload, [entry])


def cmd_gf7_verify(args) -> RunReport:
    scheme = gf7_scheme()
    bits, naive = download_cost()
    ok = verify_gf7()
    payload = {
        "field": scheme.ctx.descriptor(),
        "q": 7,
        "bits": bits,
        "naive_bits": naive,
        "scheme": scheme_to_obj(scheme),
    }
    checks = [
        _check("five-bit-reconstruction", ok and (bits, naive) == (5, 6),
               bits=bits, naive_bits=naive)
    ]
    return RunReport("gf7 verify", payload, checks)


def cmd_gf7_table(args) -> RunReport:
    ctx = field(7)
    table = figure1_table()
    cells = {(a, g): table[a][g] for a in ctx.elements for g in ctx.elements}
    bad = [
        [a, g]
        for a in ctx.elements
        for g in ctx.elements
        if table[a][g] != bucket_eval(ctx, g, a).points
    ]
    payload = {
        "field": ctx.descriptor(),
        "q": 7,
        "table": {
            str(a): {str(g): sorted(table[a][g]) for g in ctx.elements}
            for a in ctx.elements
        },
    }
    checks = [
        _check(
            "matches-computed-images",
            not bad,
            **({"counterexample": bad} if bad else {}),
        )
    ]
    return RunReport("gf7 table", payload, checks, text_body=_grid_lines(ctx, cells))


def cmd_gf7_leak(args) -> RunReport:
    t_set = set(args.set)
    if not (0 <= args.alpha < 7 and all(0 <= x < 7 for x in t_set)):
        raise PreconditionViolated("--alpha and --set must be GF(7) elements")
    out = one_bit_leak(args.alpha, t_set)
    payload = {
        "q": 7,
        "alpha": args.alpha,
        "set": sorted(t_set),
        "eliminated": {"0": sorted(out[0]), "1": sorted(out[1])},
    }
    return RunReport("gf7 leak", payload, [])


# ---------------------------------------------------------------- suite


def _guarded(name: str, q: int, fn):
    def run() -> dict:
        try:
            return fn()
        except (QmLabError, AssertionError) as exc:
            return _check(name, False, q=q, error=f"{type(exc).__name__}: {exc}")

    return run


def _sc_union_sizes(q: int) -> dict:
    ctx = field(q)
    ss = build_sqrt_system(ctx)
    pair = scaled_pair(ctx, ss)
    expected = q - 3 if ctx.p > 2 else q - 4
    bad = {}
    for d in omega_set(ctx).elements:
        n = scaled_pair_union_size(ctx, ss, pair, d)
        if n != expected:
            bad[str(d)] = n
    return _check(
        f"union-sizes-gf{q}",
        not bad,
        q=q,
        expected=expected,
        **({"counterexample": bad} if bad else {}),
    )


def _sc_scalar_evolution(q: int) -> dict:
    ctx = field(q)
    ss = build_sqrt_system(ctx)
    om = omega_set(ctx)
    bad = None
    for g in om.elements:
        for a in om.elements:
            if not scalar_evolution(ctx, ss, g, a, 1, 1):
                bad = {"gamma": g, "alpha": a}
                break
        if bad:
            break
    return _check(
        f"scalar-evolution-gf{q}",
        bad is None,
        q=q,
        **({"counterexample": bad} if bad else {}),
    )


def _sc_weil(q: int) -> dict:
    rep = complete_char_sum(field(q), (0, 1, 0, 1))
    ok = rep.square_free and rep.within_bound
    return _check(f"weil-bound-gf{q}", ok, q=q, value=rep.value, bound=rep.bound)


def _sc_residue_mix(q: int) -> dict:
    ctx = field(q)
    b11_star = b11(ctx) - {0}
    has_res = any(quadratic_character(ctx, y) == 1 for y in b11_star)
    has_non = any(quadratic_character(ctx, y) == -1 for y in b11_star)
    ok = has_res and has_non
    extra = {}
    if not ok:
        extra["counterexample"] = {
            "b11_star": sorted(b11_star),
            "squares": sorted(
                x for x in ctx.units if quadratic_character(ctx, x) == 1
            ),
        }
    return _check(f"residue-mix-gf{q}", ok, q=q, **extra)


def _sc_artin_schreier(q: int) -> dict:
    ctx = field(q)
    bad = None
    for c in ctx.elements:
        solvable, root = artin_schreier_solvable(ctx, c)
        roots = [y for y in ctx.elements if ctx.add(ctx.add(ctx.mul(y, y), y), c) == 0]
        if solvable != (ctx.trace(c) == 0) or solvable != bool(roots):
            bad = {"c": c, "trace": ctx.trace(c), "roots": roots}
            break
        if solvable and root not in roots:
            bad = {"c": c, "root": root}
            break
    return _check(
        f"artin-schreier-gf{q}",
        bad is None,
        q=q,
        **({"counterexample": bad} if bad else {}),
    )


def _sc_trace_kernel(q: int) -> dict:
    return _check(f"trace-kernel-gf{q}", b11_trace_kernel_check(field(q)), q=q)


def _sc_gf4_rejections() -> dict:
    ctx = field(4)
    leaked = []
    for name, fn in (
        ("primitive-zero-inv-trace", lambda: find_primitive_zero_inv_trace(ctx)),
        ("b11", lambda: b11(ctx)),
        ("trace-kernel", lambda: b11_trace_kernel_check(ctx)),
        ("sqrt-system", lambda: build_sqrt_system(ctx)),
    ):
        try:
            fn()
            leaked.append(name)
        except UnsupportedField:
            pass
    return _check(
        "regime-rejections-gf4",
        not leaked,
        q=4,
        **({"counterexample": leaked} if leaked else {}),
    )


def _sc_gf5_pair_absent() -> dict:
    ctx = field(5)
    try:
        scaled_pair(ctx)
        refused = False
    except NoPairExists:
        refused = True
    bset = b11(ctx)
    no_square = not any(quadratic_character(ctx, y) == 1 for y in bset - {0})
    ok = refused and bset == frozenset({0, 2, 3}) and no_square
    return _check("pair-absent-gf5", ok, q=5, b11=sorted(bset))


def _sc_character_spots() -> dict:
    ctx3, ctx5, ctx7 = field(3), field(5), field(7)
    qr3 = {x for x in ctx3.units if quadratic_character(ctx3, x) == 1}
    qr5 = {x for x in ctx5.units if quadratic_character(ctx5, x) == 1}
    ok = (
        qr3 == {1}
        and qr5 == {1, 4}
        and quadratic_character(ctx7, 0) == 0
        and minus_one_is_residue(ctx5)
    )
    return _check("character-table-spots", ok, q=7)


def _sc_scaled_pair_gf3() -> dict:
    pair = scaled_pair(field(3))
    return _check("scaled-pair-gf3", (pair.a, pair.b) == (1, 2), q=3, pair=[pair.a, pair.b])


def _sc_b11_gf3() -> dict:
    return _check("b11-gf3", b11(field(3)) == frozenset({1, 2}), q=3)


def _sc_b11_gf8() -> dict:
    got = b11(field(8))
    return _check("b11-gf8", len(got) == 4, q=8, size=len(got))


def _sc_binary_sqrt_gf8() -> dict:
    ctx = field(8)
    ss = build_sqrt_system(ctx)
    w = omega_set(ctx).omega
    z = find_primitive_zero_inv_trace(ctx)
    primitive = len({ctx.pow(z, n) for n in range(1, ctx.q)}) == ctx.q - 1
    ok = ss.sqrt(ctx.mul(w, w)) == w and primitive and ctx.trace(ctx.inv(z)) == 0
    return _check("binary-sqrt-canonical-gf8", ok, q=8, omega=w)


def _sc_gf7_scheme() -> dict:
    scheme = gf7_scheme()
    bits, naive = download_cost()
    sets = [set(mask_elems(m)) for m in scheme.sets]
    ok = (
        verify_gf7()
        and (bits, naive) == (5, 6)
        and sets == [{0, 2, 5}, {0, 1, 6}, {0, 3, 4}, {0, 2, 5}, {0, 1, 6}]
        and scheme.schedule == tuple(range(5))
        and leak_bit(scheme.sets[1], 3) == 1
        and transcript(scheme, (1, 1)) == (1, 1, 0, 1, 1)
        and verify_scheme(scheme, scheme.ctx.units)
    )
    return _check("gf7-verify-five-bits", ok, q=7, bits=bits, naive_bits=naive)


def _sc_gf7_truncations() -> dict:
    scheme = gf7_scheme()
    surviving = []
    for z in range(scheme.t):
        short = LeakageScheme(
            scheme.ctx,
            2,
            0,
            1,
            scheme.servers,
            scheme.schedule[:z] + scheme.schedule[z + 1 :],
            scheme.sets[:z] + scheme.sets[z + 1 :],
        )
        if verify_scheme(short, scheme.ctx.units):
            surviving.append(z)
    return _check(
        "gf7-truncations-fail",
        not surviving,
        q=7,
        **({"counterexample": surviving} if surviving else {}),
    )


def _sc_gf7_figure1() -> dict:
    ctx = field(7)
    table = figure1_table()
    bad = [
        [a, g]
        for a in ctx.elements
        for g in ctx.elements
        if table[a][g] != bucket_eval(ctx, g, a).points
    ]
    spots = (
        table[1][4] == {2, 3, 4, 5}
        and table[2][3] == {0, 2, 5}
        and table[1][1] == {1, 2, 5, 6}
        and table[0][6] == set(range(1, 7))
        and all(table[a][0] == set(range(7)) for a in range(7))
    )
    return _check(
        "gf7-figure1-golden",
        not bad and spots,
        q=7,
        **({"counterexample": bad} if bad else {}),
    )


def _sc_gf7_leak() -> dict:
    got = one_bit_leak(1, {0, 1, 6})
    quiet = one_bit_leak(0, set(range(7)))[0]
    ok = got[0] == frozenset({4}) and got[1] == frozenset({5}) and quiet == frozenset()
    return _check(
        "gf7-one-bit-leak", ok, q=7,
        eliminated={"0": sorted(got[0]), "1": sorted(got[1])},
    )


def _sc_gf7_bucket_lines() -> dict:
    ctx = field(7)
    lines = bucket(ctx, 1).lines
    ok = len(lines) == 6 and all(l.m == ctx.inv(l.b) for l in lines)
    return _check("gf7-product-one-lines", ok, q=7, count=len(lines))


def _sc_b11_gf5() -> dict:
    ctx = field(5)
    got = b11(ctx)
    disjoint = not any(quadratic_character(ctx, y) == 1 for y in got - {0})
    return _check("b11-gf5", got == frozenset({0, 2, 3}) and disjoint, q=5)


def _sc_scheme_roundtrip() -> dict:
    text = canonical_json(scheme_to_obj(gf7_scheme()))
    again = canonical_json(scheme_to_obj(scheme_from_obj(json.loads(text))))
    return _check("scheme-json-roundtrip", text == again, q=7)


def _sc_off_schedule() -> dict:
    ctx = field(7)
    scheme = LeakageScheme(ctx, 2, 0, 1, frozenset({3}), (3,), (mask_of({0, 1}),))
    return _check("off-schedule-rejected-gf7", mqm_check(scheme) is False, q=7)


def _sc_bound_forms(qmax: int) -> dict:
    expect_real = {4: -2.0, 5: 1.0}
    expect_int = {7: 3, 8: 2, 9: 4, 11: 4, 13: 5, 16: 4}
    bad = {}
    for q, want in expect_real.items():
        if q <= qmax:
            got = bandwidth_bound(field(q)).real_bound
            if abs(got - want) > 1e-9:
                bad[f"real q={q}"] = got
    for q, want in expect_int.items():
        if q <= qmax:
            got = bandwidth_bound(field(q)).integer_round_bound
            if got != want:
                bad[f"integer q={q}"] = got
    return _check(
        "bound-closed-forms",
        not bad,
        q=min(qmax, 16),
        **({"counterexample": bad} if bad else {}),
    )


def _replay_battery(scheme: LeakageScheme) -> tuple:
    """(all replays succeed, number of messages, largest terminal class)."""
    ctx = scheme.ctx
    om = omega_set(ctx)
    ok = True
    count = worst = 0
    for c0 in ctx.units:
        for c1 in ctx.units:
            if ctx.mul(c0, c1) not in om:
                continue
            outcome, state = replay_transcript(scheme, (c0, c1))
            ok = ok and outcome == SUCCESS
            worst = max(worst, max(m.bit_count() for m in state.classes.values()))
            count += 1
    return ok, count, worst


def _sc_pipeline_gf7() -> dict:
    ctx = field(7)
    floor = bandwidth_bound(ctx).integer_round_bound
    got = search_min_bandwidth(ctx, MQM, omega_set(ctx).elements)
    if got is None:
        return _check("pipeline-gf7", False, q=7, error="search found nothing")
    t, scheme = got
    replays_ok, count, worst = _replay_battery(scheme)
    ok = t == 3 and t >= floor and replays_ok and count == 18 and worst <= 2
    return _check(
        "pipeline-gf7", ok, q=7, t=t, floor=floor, replays=count, max_class=worst
    )


def _sc_appendix_search_gf7() -> dict:
    got = search_min_bandwidth(field(7), APPENDIX, frozenset(range(5)))
    ok = got is not None and got[0] <= 5
    return _check("appendix-search-gf7", ok, q=7, t=None if got is None else got[0])


def _sc_replay_gf8() -> dict:
    ctx = field(8)
    om = omega_set(ctx)
    scheme = LeakageScheme(
        ctx, 2, 0, 1, frozenset(om.elements), (4, 4, 7, 7), (0x8A, 0xF0, 0x2C, 0xA2)
    )
    replays_ok, count, worst = _replay_battery(scheme)
    ok = mqm_check(scheme) and replays_ok and count == 21 and worst <= 3
    return _check("replay-size-gf8", ok, q=8, replays=count, max_class=worst)


def _sc_game_floor(q: int, seed: int) -> dict:
    ctx = field(q)
    floor = bandwidth_bound(ctx).integer_round_bound
    rounds = {}
    for strategy in ("greedy-halving", "random-set"):
        rounds[strategy] = adversarial_game(GameConfig(ctx, strategy, seed=seed))
    if q == 7:
        _, scheme = search_min_bandwidth(ctx, MQM, omega_set(ctx).elements)
        rounds["replay"] = adversarial_game(
            GameConfig(ctx, "replay", seed=seed, v_seq=mqm_to_pqm(scheme))
        )
    ok = all(r >= floor for r in rounds.values())
    return _check(f"game-floor-gf{q}", ok, q=q, floor=floor, rounds=rounds)


def _sc_linleak_exhaustive() -> dict:
    ctx = field(4)
    space = [TraceQuery(a, g) for a in ctx.units for g in ctx.elements]
    count = verified = 0
    for tup in itertools.product(space, repeat=3):
        count += 1
        verified += linear_impossibility_check(ctx, 2, 0, 1, tup)
    return _check(
        "linleak-exhaustive-gf4",
        count == 1728 and verified == count,
        q=4,
        count=count,
        verified=verified,
    )


def _sc_linleak_seeded(seed: int) -> dict:
    ctx = field(8)
    rng = random.Random(seed)
    count = 1000
    verified = 0
    for _ in range(count):
        tup = tuple(
            TraceQuery(rng.randrange(1, 8), rng.randrange(8)) for _ in range(5)
        )
        verified += linear_impossibility_check(ctx, 2, 0, 1, tup)
    return _check(
        "linleak-seeded-gf8", verified == count, q=8, count=count, verified=verified
    )


def _sc_linleak_lift() -> dict:
    ctx = field(4)
    tup = (TraceQuery(1, 2), TraceQuery(2, 1), TraceQuery(3, 3))
    ok = linear_impossibility_check(ctx, 3, 0, 2, tup) and linear_impossibility_check(
        ctx, 3, 2, 0, tup
    )
    return _check("linleak-lift-gf4", ok, q=4)


def _prime_power(n: int):
    for p in range(2, n + 1):
        if p * p > n:
            return (n, 1)
        if n % p == 0:
            m, e = n, 0
            while m % p == 0:
                m //= p
                e += 1
            return (p, e) if m == 1 else None
    return None


def _suite_builders(qmax: int, seed: int) -> list:
    builders = []

    def add(name, q, fn):
        builders.append(_guarded(name, q, fn))

    for q in range(3, qmax + 1):
        pe = _prime_power(q)
        if pe is None:
            continue
        p, _e = pe
        if p == 2 and q not in (4, 8, 16, 32, 64):
            continue
        if q == 4:
            add("regime-rejections-gf4", 4, _sc_gf4_rejections)
            continue
        if q == 5:
            add("pair-absent-gf5", 5, _sc_gf5_pair_absent)
            add("weil-bound-gf5", 5, lambda: _sc_weil(5))
            continue
        add(f"union-sizes-gf{q}", q, lambda q=q: _sc_union_sizes(q))
        add(f"scalar-evolution-gf{q}", q, lambda q=q: _sc_scalar_evolution(q))
        if p > 2:
            add(f"weil-bound-gf{q}", q, lambda q=q: _sc_weil(q))
            add(f"residue-mix-gf{q}", q, lambda q=q: _sc_residue_mix(q))
        else:
            add(f"artin-schreier-gf{q}", q, lambda q=q: _sc_artin_schreier(q))
            add(f"trace-kernel-gf{q}", q, lambda q=q: _sc_trace_kernel(q))

    if qmax >= 3:
        add("scaled-pair-gf3", 3, _sc_scaled_pair_gf3)
        add("b11-gf3", 3, _sc_b11_gf3)
    if qmax >= 5:
        add("b11-gf5", 5, _sc_b11_gf5)
        add("bound-closed-forms", 5, lambda: _sc_bound_forms(qmax))
    if qmax >= 7:
        add("character-table-spots", 7, _sc_character_spots)
        add("gf7-verify-five-bits", 7, _sc_gf7_scheme)
        add("gf7-truncations-fail", 7, _sc_gf7_truncations)
        add("gf7-figure1-golden", 7, _sc_gf7_figure1)
        add("gf7-one-bit-leak", 7, _sc_gf7_leak)
        add("gf7-product-one-lines", 7, _sc_gf7_bucket_lines)
        add("scheme-json-roundtrip", 7, _sc_scheme_roundtrip)
        add("off-schedule-rejected-gf7", 7, _sc_off_schedule)
        add("pipeline-gf7", 7, _sc_pipeline_gf7)
        add("appendix-search-gf7", 7, _sc_appendix_search_gf7)
    if qmax >= 8:
        add("b11-gf8", 8, _sc_b11_gf8)
        add("binary-sqrt-canonical-gf8", 8, _sc_binary_sqrt_gf8)
        add("replay-size-gf8", 8, _sc_replay_gf8)
    for q in (7, 8, 9, 11, 13, 16):
        if q <= qmax:
            add(f"game-floor-gf{q}", q, lambda q=q: _sc_game_floor(q, seed))
    if qmax >= 4:
        add("linleak-exhaustive-gf4", 4, _sc_linleak_exhaustive)
        add("linleak-lift-gf4", 4, _sc_linleak_lift)
    if qmax >= 8:
        add("linleak-seeded-gf8", 8, lambda: _sc_linleak_seeded(seed))
    return builders


def cmd_suite(args) -> RunReport:
    builders = _suite_builders(args.qmax, args.seed)
    threads = max(1, int(os.environ.get("QMLAB_THREADS", "1")))
    if threads == 1:
        checks = [build() for build in builders]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            checks = list(pool.map(lambda build: build(), builders))
    payload = {
        "qmax": args.qmax,
        "seed": args.seed,
        "passed": sum(1 for c in checks if c["pass"]),
        "failed": sum(1 for c in checks if not c["pass"]),
    }
    return RunReport("suite", payload, checks)


# ---------------------------------------------------------------- dispatch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmlab",
        description="verification lab for low-bandwidth coefficient-product recovery",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def leaf(owner, name, func, help_):
        sp = owner.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="emit the canonical JSON report")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized batteries")
        sp.set_defaults(func=func)
        return sp

    def field_flags(sp):
        sp.add_argument("--q", type=int, help="field size (prime power)")
        sp.add_argument("--p", type=int, help="characteristic (with --e)")
        sp.add_argument("--e", type=int, help="extension degree (with --p)")

    field_flags(leaf(sub, "field", cmd_field, "print a field descriptor"))
    field_flags(leaf(sub, "residues", cmd_residues, "restricted set, roots, pair, unions"))
    sp = leaf(sub, "charsum", cmd_charsum, "complete quadratic character sum")
    field_flags(sp)
    sp.add_argument("--poly", type=_csv_ints, required=True,
                    help="coefficients, constant first (e.g. 0,1,0,1)")
    field_flags(leaf(sub, "buckets", cmd_buckets, "evaluation-image table"))

    qm = sub.add_parser("qm", help="bit-leakage schemes")
    qmsub = qm.add_subparsers(dest="action", required=True, metavar="action")
    sp = leaf(qmsub, "verify", cmd_qm_verify, "check a scheme file")
    sp.add_argument("--scheme", required=True, help="scheme JSON file")
    sp.add_argument("--domain", choices=("all", "nonzero", "omega"), default="nonzero")
    sp = leaf(qmsub, "search", cmd_qm_search, "minimum-bandwidth search")
    field_flags(sp)
    sp.add_argument("--mode", choices=tuple(_MODES), default="mqm")
    sp.add_argument("--tmax", type=int, default=None, help="largest bit budget to try")
    sp.add_argument("--budget", type=int, default=10**6, help="search node budget")
    sp.add_argument("--servers", type=_csv_ints, default=None,
                    help="server points (default: whole field)")
    sp = leaf(qmsub, "convert", cmd_qm_convert, "translate a scheme to eliminators")
    sp.add_argument("--scheme", required=True, help="scheme JSON file")

    pqm = sub.add_parser("pqm", help="pruning decoder")
    pqmsub = pqm.add_subparsers(dest="action", required=True, metavar="action")
    sp = leaf(pqmsub, "run", cmd_pqm_run, "replay a transcript against eliminators")
    sp.add_argument("--v-file", required=True, help="JSON file with a v_seq")
    sp.add_argument("--transcript", type=_csv_ints, required=True, help="bits (e.g. 0,1,0)")
    sp.add_argument("--q", type=int, help="field size when the file has no descriptor")

    def game_flags(sp):
        field_flags(sp)
        sp.add_argument("--strategy", choices=("greedy-halving", "random-set", "replay"),
                        default="greedy-halving")
        sp.add_argument("--max-rounds", type=int, default=None)
        sp.add_argument("--v-file", default=None, help="v_seq JSON for the replay strategy")

    game_flags(leaf(pqmsub, "game", cmd_game, "adversarial pruning game"))
    game_flags(leaf(sub, "game", cmd_game, "adversarial pruning game"))

    sp = leaf(sub, "bound", cmd_bound, "closed-form round floors")
    field_flags(sp)

    ll = sub.add_parser("linleak", help="linear one-symbol probes")
    llsub = ll.add_subparsers(dest="action", required=True, metavar="action")
    sp = leaf(llsub, "check", cmd_linleak_check, "transcript collisions below full download")
    field_flags(sp)
    sp.add_argument("--k", type=int, default=2, help="message dimension")
    sp.add_argument("--i", type=int, default=0, help="first target coefficient")
    sp.add_argument("--j", type=int, default=1, help="second target coefficient")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--exhaustive", action="store_true", help="all query tuples")
    group.add_argument("--samples", type=int, default=1000, help="random tuples to draw")

    gf7 = sub.add_parser("gf7", help="the fixed five-bit scheme over GF(7)")
    gf7sub = gf7.add_subparsers(dest="action", required=True, metavar="action")
    leaf(gf7sub, "verify", cmd_gf7_verify, "verify the 36-line reconstruction")
    leaf(gf7sub, "table", cmd_gf7_table, "print the 7x7 image grid")
    sp = leaf(gf7sub, "leak", cmd_gf7_leak, "products ruled out by one bit")
    sp.add_argument("--alpha", type=int, required=True, help="evaluation point")
    sp.add_argument("--set", type=_csv_ints, required=True, help="leakage set (e.g. 0,1,6)")

    sp = leaf(sub, "suite", cmd_suite, "full verification battery")
    sp.add_argument("--qmax", type=int, default=64, help="largest field size to cover")
    return parser


def cmd_dispatch(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        report = args.func(args)
    except (QmLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report.started = started
    print(report.to_json() if args.json else report.to_text())
    return 0 if report.ok() else 1


def main() -> None:
    sys.exit(cmd_dispatch())
