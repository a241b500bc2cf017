"""Exhaustive small-field sweeps of the character identities and sum bounds.

Each generator yields plain dict records with a ``pass`` key (``None`` when a
hypothesis failed and nothing was asserted).
"""
from __future__ import annotations

import logging
import math

import numpy as np

from .charsum import (
    TOL,
    AdditiveChar,
    HypothesisViolated,
    MultChar,
    kloosterman_all,
    mixed_sum,
    rho_table,
    rho_via_characters,
    tau_table,
    tau_via_characters,
    weil_sum,
)
from .ffield import build_field
from .numth import divisor_factorizations, prime_power
from .ratfunc import in_class_R, pair_setup, parse_ratfunc

log = logging.getLogger(__name__)

KINDS = ("kloosterman", "rho", "tau", "weil", "mixed")

# candidate rational functions, filtered per field by class R
WEIL_FUNCS = ("num=[1,1]", "num=[1,0,1];den=[0,1]", "num=[1,1,0,1]", "num=[0,1];den=[1,1]")
MIXED_PAIRS = (
    ("num=[1,1]", "num=[1,0,1];den=[0,1]"),
    ("num=[1,0,1]", "num=[1];den=[1,1]"),
)
UV = ((0, 0), (1, 0), (0, 1), (1, 1))


def small_fields(max_order: int, min_m: int = 1) -> list[tuple[int, int, int]]:
    """All (p, s, m) with (p^s)^m <= max_order, ordered by size."""
    out = []
    for q in range(2, max_order + 1):
        pp = prime_power(q)
        if pp is None:
            continue
        m, N = 1, q
        while N <= max_order:
            if m >= min_m:
                out.append((pp.p, pp.s, m))
            m += 1
            N *= q
    out.sort(key=lambda t: (t[0] ** (t[1] * t[2]), t))
    return out


def _power_masks(F, table):
    """mask[t] has bit i set when gamma^t is an l_i-th power, by the literal test eps^((N-1)/l) == 1."""
    N1 = F.order - 1
    primes = F.order_factorization.primes
    masks = np.zeros(N1, dtype=np.int64)
    for t in range(N1):
        eps = table.power_of_generator(t)
        bits = 0
        for i, l in enumerate(primes):
            if eps ** (N1 // l) == F.one:
                bits |= 1 << i
        masks[t] = bits
    return masks


def rho_records(max_order: int, literal_order: int = 256):
    """rho_e against the e-free indicator, for every e | q^m - 1 and every nonzero eps."""
    for p, s, m in small_fields(max_order):
        F = build_field(p, s, m)
        N1 = F.order - 1
        if N1 == 1:
            continue
        table = F.dlog_table()
        full = F.order_factorization
        masks = _power_masks(F, table)
        for e in divisor_factorizations(full):
            emask = sum(1 << i for i, l in enumerate(full.primes) if e.value % l == 0)
            indicator = ((masks & emask) == 0).astype(float)
            err = float(np.abs(rho_table(e, N1) - indicator).max())
            literal = F.order <= literal_order
            if literal:
                for t in range(N1):
                    v = rho_via_characters(table.power_of_generator(t), e, table)
                    err = max(err, abs(v - indicator[t]))
            yield {
                "lemma": "rho",
                "field": F.describe(),
                "params": {"e": str(e.value), "literal": literal, "elements": N1},
                "max_error": err,
                "tol": TOL,
                "pass": err <= TOL,
            }


def tau_records(max_order: int, literal_pairs: int = 1 << 14):
    """tau_a against the trace indicator for every nonzero eps and every a in F_q."""
    for p, s, m in small_fields(max_order):
        F = build_field(p, s, m)
        B = F.base
        lifted = AdditiveChar(F, 1, "lifted")
        base = AdditiveChar(F, 1, "base")
        # psi_hat(eps) = psi_tilde(Tr eps): reduces tau_a(eps) to T[Tr eps - a]
        err = 0.0
        for eps in F.nonzero_elements():
            err = max(err, abs(lifted(eps) - base(F.trace(eps))))
        T = tau_table(F)
        delta = np.zeros(F.q)
        delta[0] = 1.0
        err = max(err, float(np.abs(T - delta).max()))
        literal = (F.order - 1) * F.q * F.q <= literal_pairs
        if literal:
            for eps in F.nonzero_elements():
                tr = F.rel_trace(eps)
                for a in B.elements():
                    err = max(err, abs(tau_via_characters(eps, a) - (tr == a)))
        yield {
            "lemma": "tau",
            "field": F.describe(),
            "params": {"pairs": (F.order - 1) * F.q, "literal": literal},
            "max_error": err,
            "tol": TOL,
            "pass": err <= TOL,
        }


def kloosterman_records(max_order: int):
    """max |K(psi, u, v)| over (u, v) != (0, 0) against 2 q^(m/2), one record per field."""
    for p, s, m in small_fields(max_order):
        F = build_field(p, s, m)
        K = np.abs(kloosterman_all(F))
        K[0, 0] = 0.0
        bound = 2 * math.sqrt(F.order)
        worst = float(K.max())
        yield {
            "lemma": "kloosterman",
            "field": F.describe(),
            "params": {"pairs": F.q * F.q - 1},
            "magnitude": worst,
            "bound": bound,
            "pass": worst <= bound + TOL,
        }


def _small_orders(F, count: int = 2) -> list[int]:
    return list(F.order_factorization.primes[:count])


def _violated(exc: HypothesisViolated, kind: str) -> dict:
    rec = exc.value.record() if exc.value is not None else {"lemma": kind}
    rec["pass"] = None
    rec["note"] = rec.get("note") or str(exc)
    return rec


def weil_records(max_order: int, min_m: int = 2):
    for p, s, m in small_fields(max_order, min_m):
        F = build_field(p, s, m)
        if F.order <= 3:
            continue
        table = F.dlog_table()
        full = F.order_factorization
        for text in WEIL_FUNCS:
            f = parse_ratfunc(F, text)
            if f.degree_sum == 0 or not in_class_R(f, full):
                continue
            for d in _small_orders(F):
                try:
                    yield weil_sum(f, MultChar(table, d, 1)).record()
                except HypothesisViolated as exc:
                    yield _violated(exc, "weil")


def mixed_records(max_order: int, min_m: int = 2, second_pair_order: int = 256):
    for p, s, m in small_fields(max_order, min_m):
        F = build_field(p, s, m)
        if F.order <= 3:
            continue
        table = F.dlog_table()
        full = F.order_factorization
        pairs = MIXED_PAIRS if F.order <= second_pair_order else MIXED_PAIRS[:1]
        for ftext, gtext in pairs:
            f, g = parse_ratfunc(F, ftext), parse_ratfunc(F, gtext)
            if f.degree_sum == 0 or g.degree_sum == 0:
                continue
            if not (in_class_R(f, full) and in_class_R(g, full)):
                continue
            setup = pair_setup(f, g)
            ells = _small_orders(F)
            d_pairs = [(1, 1), (1, ells[0]), (ells[0], 1), (ells[0], ells[-1])]
            for d1, d2 in d_pairs:
                chi1, chi2 = MultChar(table, d1, int(d1 > 1)), MultChar(table, d2, int(d2 > 1))
                for u, v in UV:
                    try:
                        yield mixed_sum(setup, chi1, chi2, u, v).record()
                    except HypothesisViolated as exc:
                        yield _violated(exc, "mixed")


def lemma_records(max_order: int, kinds=KINDS):
    kinds = set(kinds)
    if "kloosterman" in kinds:
        yield from kloosterman_records(max_order)
    if "rho" in kinds:
        yield from rho_records(max_order)
    if "tau" in kinds:
        yield from tau_records(max_order)
    if "weil" in kinds:
        yield from weil_records(max_order)
    if "mixed" in kinds:
        yield from mixed_records(max_order)


def summarize(records) -> dict:
    """Counts of passed, failed and hypothesis-violated records, plus the case rows seen."""
    out = {"passed": 0, "failed": 0, "violated": 0, "cases": set(), "failures": []}
    for r in records:
        if r["pass"] is None:
            out["violated"] += 1
        elif r["pass"]:
            out["passed"] += 1
            case = r.get("params", {}).get("case")
            if case:
                out["cases"].add(case)
        else:
            out["failed"] += 1
            out["failures"].append(r)
    return out
