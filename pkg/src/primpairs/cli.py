"""Command-line front end.  Every subcommand writes JSON lines to stdout.

Rational functions are given as ``num=[c0,c1,...];den=[d0,d1,...]``: integer
coefficients, constant term first, reduced mod p; ``den`` defaults to [1].
For example ``num=[1,0,1];den=[0,1]`` is (x^2 + 1)/x.

A field is given by ``--p P --s S --m M``: the extension of degree M over
F_q, q = P^S.  Base-field values (a, b, u, v) are integers in [0, q) whose
base-P digits are the coefficients of the element of F_q.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from . import __version__
from .bounds import (
    SieveConfig,
    best_sieve_search,
    d_bound,
    global_threshold,
    i_threshold,
    new_suff,
    robin_check,
    robin_rhs,
    sieve_condition,
    suff_conditions,
)
from .numth import BudgetExceeded, DEFAULT_BUDGET, factor, factor_qm_minus_1

SCHEMA = "v1"

EXIT_OK, EXIT_MATH, EXIT_USAGE = 0, 1, 2


class _Out:
    def __init__(self, stream, timestamp: bool):
        self.stream = stream
        self.timestamp = timestamp

    def emit(self, record: dict):
        rec = {"schema": SCHEMA, **record}
        if self.timestamp:
            rec["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        self.stream.write(json.dumps(rec, sort_keys=False) + "\n")
        self.stream.flush()


def _fact_json(f) -> dict:
    return {
        "value": str(f.value),
        "factors": [[str(p), e] for p, e in f.factors],
        "w": f.w,
        "W": f.W,
    }


def _field(args):
    from .ffield import build_field

    return build_field(args.p, args.s, args.m)


def cmd_factor(args, out: _Out) -> int:
    if args.n is not None:
        f = factor(args.n, args.budget)
    else:
        if args.m is None:
            raise ValueError("--m is required with --q")
        f = factor_qm_minus_1(args.q, args.m, args.budget)
    out.emit({"type": "Factorization", **_fact_json(f)})
    return EXIT_OK


def cmd_field_info(args, out: _Out) -> int:
    F = _field(args)
    rec = {"type": "ExtField", "field": F.describe(), "order": str(F.order)}
    rec["order_minus_1"] = _fact_json(F.order_factorization)
    if F.order <= args.dlog_cap:
        rec["generator"] = F.index(F.dlog_table(args.dlog_cap).generator)
    out.emit(rec)
    return EXIT_OK


def cmd_count(args, out: _Out) -> int:
    from .oracle import CountQuery, count_N
    from .ratfunc import pair_setup, parse_ratfunc

    F = _field(args)
    f = parse_ratfunc(F, args.f)
    g = parse_ratfunc(F, args.g)
    setup = pair_setup(f, g)
    full = F.order_factorization.value
    e1 = args.e1 if args.e1 is not None else full
    e2 = args.e2 if args.e2 is not None else full
    query = CountQuery.make(setup, args.a, args.b, e1, e2)
    res = count_N(query, args.cap)
    out.emit({
        "type": "CountResult",
        "field": F.describe(),
        "f": str(f),
        "g": str(g),
        "m1": setup.m1,
        "m2": setup.m2,
        "a": args.a,
        "b": args.b,
        "e1": str(query.e1.value),
        "e2": str(query.e2.value),
        "N": res.N,
        "witnesses": [F.index(w) for w in res.witnesses],
        "checks": {"witnesses_rechecked": len(res.witnesses), "S_size": len(setup.S)},
    })
    return EXIT_OK


def cmd_verify_lemmas(args, out: _Out) -> int:
    from .verify import lemma_records

    ok = True
    for rec in lemma_records(args.max_order, kinds=set(args.kind)):
        out.emit(rec)
        ok &= rec["pass"] is not False
    return EXIT_OK if ok else EXIT_MATH


def cmd_sieve(args, out: _Out) -> int:
    fact = factor_qm_minus_1(args.q, args.m, args.budget)
    rec = {
        "type": "SieveReport",
        "q": args.q,
        "m": args.m,
        "m1": args.m1,
        "m2": args.m2,
        "factorization": _fact_json(fact),
        **suff_conditions(args.q, args.m, args.m1, args.m2, fact.w),
    }
    if args.kept is not None:
        kept = [p for p in fact.primes if p in set(args.kept)]
        cfg = SieveConfig.make(kept, [p for p in fact.primes if p not in set(args.kept)], args.sieve_variant)
        rec["config"] = cfg.to_json()
        rec["sieve_pass"] = cfg.l > 0 and sieve_condition(args.q, args.m, args.m1, args.m2, cfg)
    else:
        cfg = best_sieve_search(args.q, args.m, args.m1, args.m2, fact, args.sieve_variant)
        rec["config"] = cfg.to_json() if cfg else None
        rec["sieve_pass"] = cfg is not None
    out.emit(rec)
    return EXIT_OK


def cmd_threshold(args, out: _Out) -> int:
    rec = {"type": "Threshold"}
    code = EXIT_OK
    if args.m_prime is not None:
        x = global_threshold(args.m_prime)
        below = x < 2**args.m_prime - 1
        rec.update({"m_prime": args.m_prime, "x_prime": x, "below_2_pow_m_prime_minus_1": below})
        code = EXIT_OK if below else EXIT_MATH
    if args.i_for_m is not None:
        rec.update({"m": args.i_for_m, "i_threshold": i_threshold(args.i_for_m)})
    out.emit(rec)
    return code


def cmd_dbound(args, out: _Out) -> int:
    code = EXIT_OK
    if args.M is not None:
        params, ok = d_bound(factor(args.M), args.nu)
        out.emit({"type": "DBound", "M": str(args.M), "nu": params.nu, "D": params.D,
                  "small_primes": list(params.small_primes), "verified": ok})
        code |= EXIT_OK if ok else EXIT_MATH
    if args.robin is not None:
        ok = robin_check(args.robin)
        out.emit({"type": "Robin", "n": str(args.robin), "w": factor(args.robin).w,
                  "rhs": robin_rhs(args.robin), "holds": ok})
        code |= EXIT_OK if ok else EXIT_MATH
    return code


def cmd_hunt(args, out: _Out) -> int:
    from .hunt import HuntPlan, hunt_all

    plan = HuntPlan(
        m_from=args.m_from,
        m_to=args.m_to,
        m1=args.m1,
        m2=args.m2,
        variant=args.sieve_variant,
        w_cap=args.w_cap,
        factor_budget=args.factor_budget,
        threads=args.threads,
        q_only=tuple(args.q_only) if args.q_only else None,
    )
    sink = open(args.json_out, "w") if args.json_out else None
    sink_out = _Out(sink, out.timestamp) if sink else out

    def on_verdict(v):
        sink_out.emit(v.to_json())

    try:
        report = hunt_all(plan, on_verdict=on_verdict)
        sink_out.emit(report.to_json())
    finally:
        if sink:
            sink.close()
    if sink:
        out.emit({k: v for k, v in report.to_json().items() if k != "audit"})
    return EXIT_OK if report.clean else EXIT_MATH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="primpairs",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--no-timestamp", action="store_true", help="omit timestamps for byte-stable output")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def field_args(p):
        p.add_argument("--p", type=int, required=True, help="characteristic")
        p.add_argument("--s", type=int, default=1, help="q = p^s")
        p.add_argument("--m", type=int, required=True, help="extension degree over F_q")

    p = sub.add_parser("factor", help="factor n or q^m - 1")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--n", type=int)
    grp.add_argument("--q", type=int)
    p.add_argument("--m", type=int, help="exponent, with --q")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("field-info", help="describe the deterministic field tower")
    field_args(p)
    p.add_argument("--dlog-cap", type=int, default=1 << 20)
    p.set_defaults(func=cmd_field_info)

    p = sub.add_parser("count", help="exact N_{f,g,a,b}(e1,e2) by enumeration",
                       description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    field_args(p)
    p.add_argument("--f", required=True, help="e.g. 'num=[1,0,1];den=[0,1]'")
    p.add_argument("--g", required=True)
    p.add_argument("--a", type=int, default=0)
    p.add_argument("--b", type=int, default=0)
    p.add_argument("--e1", type=int, help="divisor of q^m-1 (default q^m-1)")
    p.add_argument("--e2", type=int)
    p.add_argument("--cap", type=int, default=1 << 16)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify-lemmas", help="character-sum bounds on all small fields")
    p.add_argument("--max-order", type=int, default=64, help="largest q^m to enumerate")
    p.add_argument("--kind", nargs="+", default=["kloosterman", "weil", "mixed", "rho", "tau"],
                   choices=["kloosterman", "weil", "mixed", "rho", "tau"])
    p.set_defaults(func=cmd_verify_lemmas)

    p = sub.add_parser("sieve", help="closed-form and sieve criteria for one (q, m)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--m1", type=int, default=3)
    p.add_argument("--m2", type=int, default=3)
    p.add_argument("--kept", type=int, nargs="*", help="primes of d (default: best search)")
    p.add_argument("--sieve-variant", choices=["L", "l"], default="L")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("threshold", help="global x' threshold and the primorial i threshold")
    p.add_argument("--m-prime", type=int)
    p.add_argument("--i-for-m", type=int)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("dbound", help="W(M) <= D M^(1/nu) and the Robin bound")
    p.add_argument("--M", type=int)
    p.add_argument("--nu", type=float, default=6.0)
    p.add_argument("--robin", type=int, metavar="N")
    p.set_defaults(func=cmd_dbound)

    p = sub.add_parser("hunt", help="search m in [m-from, m-to] for exceptional (q, m)")
    p.add_argument("--m-from", type=int, default=9)
    p.add_argument("--m-to", type=int, default=108)
    p.add_argument("--m1", type=int, default=3)
    p.add_argument("--m2", type=int, default=3)
    p.add_argument("--sieve-variant", choices=["L", "l"], default="L")
    p.add_argument("--w-cap", type=int, default=400)
    p.add_argument("--factor-budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--q-only", type=int, nargs="+", help="restrict explicit checks to these q")
    p.add_argument("--json-out", metavar="PATH")
    p.set_defaults(func=cmd_hunt)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    out = _Out(sys.stdout, not args.no_timestamp)
    config = {k: v for k, v in vars(args).items() if k != "func"}
    out.emit({"type": "config", **config})
    try:
        return args.func(args, out)
    except (ValueError, TypeError) as exc:
        _err({"type": "error", "kind": "usage", "message": str(exc)})
        return EXIT_USAGE
    except (BudgetExceeded, ArithmeticError, RuntimeError) as exc:
        _err({"type": "error", "kind": type(exc).__name__, "message": str(exc)})
        return EXIT_MATH


def _err(rec: dict):
    sys.stderr.write(json.dumps({"schema": SCHEMA, **rec}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
