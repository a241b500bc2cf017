"""The search over (q, m), m >= 9, for pairs the existence criteria cannot settle."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .bounds import (
    SieveConfig,
    auto_pass_any_k,
    best_sieve_search,
    for_i_holds,
    global_threshold,
    i_threshold,
    new_suff,
    smallest_prime_power_above_root,
)
from .numth import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    PrimePower,
    factor_qm_minus_1,
    integer_nth_root,
    is_prime,
    primes_up_to,
    primorial_and_primes,
)

__all__ = [
    "HuntPlan",
    "PairVerdict",
    "ExceptionReport",
    "TailNotClosed",
    "reference_exceptions",
    "prime_power_iter",
    "tail_closure",
    "hunt_m",
    "hunt_all",
    "DUPLICATED_PAIR",
]

log = logging.getLogger(__name__)

M_PRIME = 109


class TailNotClosed(RuntimeError):
    def __init__(self, m: int, w_cap: int):
        super().__init__(f"no closing w* <= {w_cap} for m = {m}")
        self.m = m


_REFERENCE = {
    9: (2, 3, 4, 5, 7, 9, 11, 16),
    10: (2, 3, 4, 5, 7, 8, 11, 23),
    11: (2, 3, 4),
    12: (2, 3, 4, 5, 7, 8, 11, 16),
}
_REFERENCE_Q2 = (13, 14, 15, 16, 18, 20, 24)

# appears twice in the published exception list
DUPLICATED_PAIR = (4, 12)


def reference_exceptions() -> frozenset[tuple[int, int]]:
    """The 34 (q, m) pairs listed as possible exceptions for m >= 9."""
    pairs = {(q, m) for m, qs in _REFERENCE.items() for q in qs}
    pairs |= {(2, m) for m in _REFERENCE_Q2}
    return frozenset(pairs)


def prime_power_iter(bound: int):
    """Yield PrimePower(p, s, q) for every prime power q <= bound, increasing in q."""
    if bound < 2:
        return
    pps = []
    for p in primes_up_to(bound):
        q, s = p, 1
        while q <= bound:
            pps.append((q, p, s))
            q *= p
            s += 1
    for q, p, s in sorted(pps):
        yield PrimePower(p, s, q)


@dataclass(frozen=True)
class HuntPlan:
    m_from: int = 9
    m_to: int = 108
    m1: int = 3
    m2: int = 3
    variant: str = "L"
    w_cap: int = 400
    factor_budget: int = DEFAULT_BUDGET
    threads: int = 1
    q_only: tuple[int, ...] | None = None  # restrict explicit checks to these q

    def __post_init__(self):
        if not (5 <= self.m_from <= self.m_to <= 108):
            raise ValueError("m range must lie within [5, 108]")
        if self.m1 < 1 or self.m2 < 1:
            raise ValueError("m1, m2 must be >= 1")
        if self.variant not in ("L", "l"):
            raise ValueError("variant must be L or l")

    @property
    def is_default(self) -> bool:
        return self == HuntPlan(threads=self.threads)

    def to_json(self) -> dict:
        return {
            "m_from": self.m_from,
            "m_to": self.m_to,
            "m1": self.m1,
            "m2": self.m2,
            "sieve_variant": self.variant,
            "w_cap": self.w_cap,
            "factor_budget": self.factor_budget,
            "q_only": list(self.q_only) if self.q_only else None,
        }


@dataclass
class PairVerdict:
    q: int
    m: int
    w: int | str
    passed_new_suff: bool
    sieve: SieveConfig | None
    status: str  # pass | exceptional | unresolved

    def __post_init__(self):
        if self.status == "pass" and not (self.passed_new_suff or self.sieve is not None):
            raise ValueError("pass verdict without a certificate")
        if self.status == "exceptional" and self.w == "unresolved":
            raise ValueError("exceptional verdict needs a full factorization")

    def to_json(self) -> dict:
        return {
            "type": "PairVerdict",
            "q": self.q,
            "m": self.m,
            "w": self.w,
            "passed_new_suff": self.passed_new_suff,
            "sieve": self.sieve.to_json() if self.sieve else None,
            "status": self.status,
        }


@dataclass
class MAudit:
    m: int
    w_star: int
    i_threshold: int | None
    closed_by: dict  # w -> "for_i" | k (auto sieve kept count), only for w >= w_star
    q_ranges: list  # (w, q_lo, q_hi) explicit search windows for w < w_star
    explicit_q: int  # number of prime powers decided directly

    def to_json(self) -> dict:
        kinds = {}
        for v in self.closed_by.values():
            key = v if isinstance(v, str) else "auto_sieve"
            kinds[key] = kinds.get(key, 0) + 1
        return {
            "m": self.m,
            "w_star": self.w_star,
            "i_threshold": self.i_threshold,
            "tail_closure_counts": kinds,
            "q_ranges": [list(r) for r in self.q_ranges],
            "explicit_q": self.explicit_q,
        }


@dataclass
class ExceptionReport:
    exceptional: list
    reference: list
    missing: list  # in reference, not found
    extra: list  # found, not in reference
    unresolved: list
    audit: list
    plan: dict
    x_prime: float
    notes: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.missing and not self.extra and not self.unresolved

    def to_json(self) -> dict:
        return {
            "type": "ExceptionReport",
            "plan": self.plan,
            "exceptional": [list(p) for p in self.exceptional],
            "count": len(self.exceptional),
            "reference_count": len(self.reference),
            "missing": [list(p) for p in self.missing],
            "extra": [list(p) for p in self.extra],
            "unresolved": [list(p) for p in self.unresolved],
            "x_prime_109": self.x_prime,
            "audit": [a.to_json() for a in self.audit],
            "notes": self.notes,
        }


def tail_closure(m: int, plan: HuntPlan):
    """Smallest w* such that every w in [w*, w_cap] is settled without knowing q.

    A w is settled when the primorial inequality forces the condition for
    all q with w(q^m - 1) = w, or when the adversarial sieve certificate
    passes for some k.  Returns (w_star, closed_by).
    """
    closed: dict = {}
    w_star = plan.w_cap + 1
    for w in range(plan.w_cap, -1, -1):
        how = None
        if plan.m1 == plan.m2 == 3 and for_i_holds(m, w):
            how = "for_i"
        else:
            k = auto_pass_any_k(m, w, plan.m1, plan.m2, plan.variant)
            if k is not None:
                how = k
        if how is None:
            break
        closed[w] = how
        w_star = w
    if plan.w_cap not in closed:
        raise TailNotClosed(m, plan.w_cap)
    return w_star, closed


def _q_window(m: int, w: int, m1: int, m2: int) -> tuple[int, int]:
    """Prime powers with w(q^m - 1) = w that can fail the base closed form lie in [lo, hi]."""
    _, P = primorial_and_primes(w)
    lo = smallest_prime_power_above_root(P, m) if w > 0 else 2
    if m1 == m2 == 3:
        # q^(m-4) <= 2^(4(2+w))
        hi = integer_nth_root(1 << (4 * (2 + w)), m - 4)
    else:
        W = 1 << w
        rhs_sq = (2 * (m1 + m2 + 2) * W * W) ** 2
        hi = integer_nth_root(rhs_sq, m - 4)
    return lo, hi


def decide_pair(q: int, m: int, plan: HuntPlan) -> PairVerdict:
    try:
        fact = factor_qm_minus_1(q, m, plan.factor_budget)
    except BudgetExceeded:
        log.warning("factorization of %d^%d - 1 unresolved", q, m)
        return PairVerdict(q, m, "unresolved", False, None, "unresolved")
    w = fact.w
    if plan.m1 == plan.m2 == 3:
        ok = new_suff(q, m, w)
    else:
        from .bounds import suff_conditions

        ok = suff_conditions(q, m, plan.m1, plan.m2, w)["suff"]
    if ok:
        return PairVerdict(q, m, w, True, None, "pass")
    cfg = best_sieve_search(q, m, plan.m1, plan.m2, fact, plan.variant)
    if cfg is not None:
        return PairVerdict(q, m, w, False, cfg, "pass")
    return PairVerdict(q, m, w, False, None, "exceptional")


def hunt_m(m: int, plan: HuntPlan) -> tuple[list[PairVerdict], MAudit]:
    if not plan.m_from <= m <= plan.m_to:
        raise ValueError(f"m = {m} outside plan range")
    w_star, closed = tail_closure(m, plan)
    windows = []
    candidates: set[int] = set()
    for w in range(w_star):
        lo, hi = _q_window(m, w, plan.m1, plan.m2)
        if lo > hi:
            continue
        windows.append((w, lo, hi))
    q_top = max((hi for _, _, hi in windows), default=1)
    for pp in prime_power_iter(q_top):
        if any(lo <= pp.q <= hi for _, lo, hi in windows):
            candidates.add(pp.q)
    if plan.q_only is not None:
        candidates &= set(plan.q_only)
    verdicts = [decide_pair(q, m, plan) for q in sorted(candidates)]
    try:
        it = i_threshold(m)
    except Exception:
        it = None
    audit = MAudit(m, w_star, it, closed, windows, len(candidates))
    return verdicts, audit


def _hunt_m_task(args):
    m, plan = args
    return m, hunt_m(m, plan)


def hunt_all(plan: HuntPlan, on_verdict=None) -> ExceptionReport:
    """Run hunt_m over the plan's range and diff the exceptional set with the reference."""
    ms = list(range(plan.m_from, plan.m_to + 1))
    results: dict = {}
    if plan.threads > 1:
        with ProcessPoolExecutor(max_workers=plan.threads) as ex:
            for m, res in ex.map(_hunt_m_task, [(m, plan) for m in ms]):
                results[m] = res
    else:
        for m in ms:
            results[m] = hunt_m(m, plan)
            log.info("m = %d done", m)
    exceptional, unresolved, audit = [], [], []
    for m in ms:
        verdicts, a = results[m]
        audit.append(a)
        for v in verdicts:
            if on_verdict is not None:
                on_verdict(v)
            if v.status == "exceptional":
                exceptional.append((v.q, v.m))
            elif v.status == "unresolved":
                unresolved.append((v.q, v.m))
    ref = {
        (q, m) for (q, m) in reference_exceptions()
        if plan.m_from <= m <= plan.m_to and (plan.q_only is None or q in plan.q_only)
    }
    found = set(exceptional)
    key = lambda p: (p[1], p[0])
    x_prime = global_threshold(M_PRIME)
    notes = [
        f"{DUPLICATED_PAIR} appears twice in the published exception list; the reference set counts it once",
        f"m >= {M_PRIME} settled by the threshold x' = {x_prime:.4g} < 2^{M_PRIME} - 1: {x_prime < 2**M_PRIME - 1}",
    ]
    if plan.variant != "L":
        notes.append("variant run: literal l-form sieve multiplier")
    return ExceptionReport(
        exceptional=sorted(found, key=key),
        reference=sorted(ref, key=key),
        missing=sorted(ref - found, key=key),
        extra=sorted(found - ref, key=key),
        unresolved=sorted(unresolved, key=key),
        audit=audit,
        plan=plan.to_json(),
        x_prime=x_prime,
        notes=notes,
    )
