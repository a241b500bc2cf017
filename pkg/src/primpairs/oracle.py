"""Brute-force ground truth: exact N_{f,g,a,b}(e1, e2) on small fields."""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .bounds import exact_le_sqrt, lower_bound_N
from .ffield import CapExceeded, ExtField, FieldElem
from .numth import Factorization, arith_functions
from .ratfunc import PairSetup, in_class_R

__all__ = [
    "COUNT_CAP",
    "CountQuery",
    "CountResult",
    "FieldProfile",
    "count_N",
    "exists_primitive_pair",
    "verify_sieve_lemmas",
    "verify_lower_bound",
]

COUNT_CAP = 1 << 16
WITNESS_CAP = 10
log = logging.getLogger(__name__)


def _as_divisor(e, full: Factorization) -> Factorization:
    if isinstance(e, Factorization):
        if full.value % e.value:
            raise ValueError(f"{e.value} does not divide {full.value}")
        return e
    if full.value % e:
        raise ValueError(f"{e} does not divide {full.value}")
    fs = []
    for p, _ in full.factors:
        k = 0
        while e % p == 0:
            e //= p
            k += 1
        if k:
            fs.append((p, k))
    return Factorization(math.prod(p**k for p, k in fs), tuple(fs))


@dataclass
class CountQuery:
    field: ExtField
    setup: PairSetup
    a: int
    b: int
    e1: Factorization
    e2: Factorization

    @classmethod
    def make(cls, setup: PairSetup, a: int, b: int, e1, e2) -> "CountQuery":
        F = setup.f.field
        full = F.order_factorization
        q = cls(F, setup, a, b, _as_divisor(e1, full), _as_divisor(e2, full))
        for name, rf in (("f", setup.f), ("g", setup.g)):
            if not in_class_R(rf, full):
                warnings.warn(f"{name} = {rf} is not in class R; bounds do not apply")
        return q


@dataclass
class CountResult:
    N: int
    witnesses: list = field(default_factory=list)


class FieldProfile:
    """Per-element data for eps outside S, computed once per (field, f, g).

    For each eps: Tr(eps), Tr(1/eps) and the sets of primes l | q^m - 1 for
    which f(eps)^((q^m-1)/l) == 1 (resp. g).  The power test is read off the
    discrete log: gamma^(t (q^m-1)/l) == 1 exactly when l divides t.
    """

    def __init__(self, setup: PairSetup, cap: int = COUNT_CAP):
        F = setup.f.field
        if F.order > cap:
            raise CapExceeded(f"q^m = {F.order} exceeds count cap {cap}")
        self.setup = setup
        self.field = F
        self.fact = F.order_factorization
        table = F.dlog_table(max(cap, F.order))
        primes = self.fact.primes
        self.rows = []  # (index, tr, trinv, fmask, gmask)
        for e in F.nonzero_elements():
            if e in setup.S:
                continue
            tf = table.dlog(setup.f(e))
            tg = table.dlog(setup.g(e))
            fmask = sum(1 << i for i, l in enumerate(primes) if tf % l == 0)
            gmask = sum(1 << i for i, l in enumerate(primes) if tg % l == 0)
            inv = table.inverse(e)
            self.rows.append((F.index(e), F.trace(e), F.trace(inv), fmask, gmask))

    def mask(self, e: Factorization) -> int:
        return sum(1 << i for i, l in enumerate(self.fact.primes) if e.value % l == 0)

    def count(self, a: int, b: int, e1: Factorization, e2: Factorization, witnesses: int = 0) -> CountResult:
        m1, m2 = self.mask(e1), self.mask(e2)
        n, wit = 0, []
        for idx, tr, tri, fm, gm in self.rows:
            if tr == a and tri == b and not (fm & m1) and not (gm & m2):
                n += 1
                if len(wit) < witnesses:
                    wit.append(self.field.element(idx))
        return CountResult(n, wit)


_PROFILES: dict = {}


def _profile(setup: PairSetup, cap: int) -> FieldProfile:
    key = id(setup)
    prof = _PROFILES.get(key)
    if prof is None or prof.setup is not setup:
        prof = FieldProfile(setup, cap)
        _PROFILES.clear()  # keep one profile alive at a time
        _PROFILES[key] = prof
    return prof


def count_N(query: CountQuery, cap: int = COUNT_CAP, witnesses: int = WITNESS_CAP) -> CountResult:
    """#{eps not in S : f(eps) e1-free, g(eps) e2-free, Tr(eps) = a, Tr(1/eps) = b}."""
    prof = _profile(query.setup, cap)
    res = prof.count(query.a, query.b, query.e1, query.e2, witnesses)
    for w in res.witnesses:
        _recheck_witness(query, w)
    return res


def _recheck_witness(query: CountQuery, eps: FieldElem) -> None:
    # independent path: literal powers and literal sum of conjugates
    F = query.field
    fv, gv = query.setup.f(eps), query.setup.g(eps)
    ok = (
        eps not in query.setup.S
        and F.rel_trace(eps) == query.a
        and F.rel_trace(eps.inverse()) == query.b
        and F.is_e_free(fv, query.e1)
        and F.is_e_free(gv, query.e2)
    )
    if not ok:
        raise AssertionError(f"witness {eps!r} fails recheck")


def exists_primitive_pair(setup: PairSetup, a: int, b: int, cap: int = COUNT_CAP):
    """(True, witness) if some eps gives primitive f(eps), g(eps) with the traces; else (False, None)."""
    F = setup.f.field
    full = F.order_factorization
    res = count_N(CountQuery.make(setup, a, b, full, full), cap, witnesses=1)
    return (res.N > 0, res.witnesses[0] if res.witnesses else None)


@dataclass
class LemmaReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def add(self, name, lhs, rhs, ok, **extra):
        self.checks.append({"check": name, "lhs": str(lhs), "rhs": str(rhs), "pass": bool(ok), **extra})


def verify_sieve_lemmas(setup: PairSetup, a: int, b: int, d, cap: int = COUNT_CAP) -> LemmaReport:
    """Check the sieve decomposition and the per-prime deviation bounds with exact counts."""
    F = setup.f.field
    full = F.order_factorization
    dfact = _as_divisor(d, full)
    sieved = [p for p in full.primes if dfact.value % p]
    prof = _profile(setup, cap)

    def N(e1, e2):
        return prof.count(a, b, e1, e2).N

    def with_prime(p):
        return _as_divisor(dfact.value * p, full)

    rep = LemmaReport()
    r = len(sieved)
    n_full = N(full, full)
    n_dd = N(dfact, dfact)
    rhs = sum(N(dfact, with_prime(p)) for p in sieved) + sum(N(with_prime(p), dfact) for p in sieved)
    rhs -= (2 * r - 1) * n_dd
    rep.add("sieve-decomposition", n_full, rhs, n_full >= rhs, d=dfact.value, r=r)

    msum = setup.m1 + setup.m2 + 2
    theta_d = arith_functions(dfact).theta
    Wd = dfact.W
    for p in sieved:
        theta_p = Fraction(p - 1, p)
        coeff = theta_p * theta_d**2 * msum * Wd**2  # times q^(m/2)
        for label, val in (("pd,d", N(with_prime(p), dfact)), ("d,pd", N(dfact, with_prime(p)))):
            dev = abs(val - theta_p * n_dd)
            ok = exact_le_sqrt(dev, coeff, F.order)
            rep.add(f"prime-deviation[{label}]", dev, f"{coeff}*sqrt({F.order})", ok, p=p, d=dfact.value)
    return rep


def verify_lower_bound(query: CountQuery, cap: int = COUNT_CAP) -> dict:
    """Compare the exact count with the closed-form lower bound (exact arithmetic)."""
    res = count_N(query, cap, witnesses=0)
    F = query.field
    lb = lower_bound_N(F.q, F.m, query.setup.m1, query.setup.m2, query.e1, query.e2)
    ok = lb.is_at_most(res.N)
    return {
        "N": res.N,
        "bound": float(lb),
        "bound_positive": lb.positive,
        "pass": ok,
        "trivial": not lb.positive,
    }
