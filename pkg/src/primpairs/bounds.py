"""Exact evaluation of the existence conditions and the sieve criterion.

Every verdict compares q^(m/2 - 2) with a nonnegative rational by squaring,
so no float ever decides a pass or a failure.  The real-valued helpers
(d_bound, robin_check, global_threshold) round conservatively.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .numth import (
    Factorization,
    arith_functions,
    factor,
    integer_nth_root,
    is_prime,
    primes_up_to,
    primorial_and_primes,
    _first_primes,
)

__all__ = [
    "NonPositiveL",
    "NoThreshold",
    "DomainError",
    "SieveConfig",
    "LowerBoundBreakdown",
    "DBoundParams",
    "Verdict",
    "pow_half_exceeds",
    "exact_le_sqrt",
    "base_condition",
    "suff_conditions",
    "sieve_condition",
    "sieve_rhs",
    "best_sieve_search",
    "lower_bound_N",
    "d_bound",
    "robin_check",
    "robin_rhs",
    "global_threshold",
    "i_threshold",
    "for_i_holds",
    "smallest_prime_power_above_root",
    "sieve_auto_pass",
]

ROBIN_CONST = 1.385
FOR_M_CONST = 2.77
THRESHOLD_SCAN_CAP = 1e40


class NonPositiveL(ValueError):
    pass


class NoThreshold(ArithmeticError):
    pass


class DomainError(ValueError):
    pass


def pow_half_exceeds(q: int, m: int, rhs, strict: bool = True) -> bool:
    """q^(m/2 - 2) > rhs (or >= when strict is False), decided by squaring."""
    rhs = Fraction(rhs)
    if rhs < 0:
        return True
    lhs_sq = Fraction(q) ** (m - 4)
    rhs_sq = rhs * rhs
    return lhs_sq > rhs_sq if strict else lhs_sq >= rhs_sq


def exact_le_sqrt(x, c, radicand: int) -> bool:
    """x <= c * sqrt(radicand) for rational x and c >= 0."""
    x, c = Fraction(x), Fraction(c)
    if c < 0:
        raise ValueError("coefficient must be nonnegative")
    if x <= 0:
        return True
    return x * x <= c * c * radicand


@dataclass(frozen=True)
class Verdict:
    passed: bool
    margin: Fraction  # q^(m-4) - rhs^2; sign agrees with the strict verdict
    rhs: Fraction

    def ratio(self, q: int, m: int) -> float:
        """q^(m/2-2) / rhs as a float, for reports only."""
        if self.rhs == 0:
            return math.inf
        return math.exp((m / 2 - 2) * math.log(q) - math.log(self.rhs))


def _verdict(q: int, m: int, rhs: Fraction) -> Verdict:
    margin = Fraction(q) ** (m - 4) - rhs * rhs
    return Verdict(margin > 0, margin, rhs)


def base_condition(q: int, m: int, m1: int, m2: int, W1: int, W2: int) -> Verdict:
    """q^(m/2-2) > (m1 W1 + m2 W2) + (m1 + m2 + 2) W1 W2."""
    rhs = Fraction(m1 * W1 + m2 * W2 + (m1 + m2 + 2) * W1 * W2)
    return _verdict(q, m, rhs)


def suff_conditions(q: int, m: int, m1: int, m2: int, w: int) -> dict:
    """Both closed forms: 2(m1+m2+2) W^2 and its m1 = m2 = 3 specialization 2^(2(2+w))."""
    W = 1 << w
    return {
        "suff": pow_half_exceeds(q, m, 2 * (m1 + m2 + 2) * W * W, strict=False),
        "new_suff": pow_half_exceeds(q, m, 1 << (2 * (2 + w)), strict=False),
    }


def new_suff(q: int, m: int, w: int) -> bool:
    # q^(m-4) >= 2^(4(2+w)), exactly the squared form
    return q ** (m - 4) >= 1 << (4 * (2 + w))


@dataclass(frozen=True)
class SieveConfig:
    kept_primes: tuple[int, ...]
    sieved_primes: tuple[int, ...]
    r: int
    l: Fraction
    L: Fraction | None
    variant: str = "L"

    @classmethod
    def make(cls, kept, sieved, variant: str = "L", reciprocal_sum: Fraction | None = None) -> "SieveConfig":
        if variant not in ("L", "l"):
            raise ValueError("variant must be 'L' or 'l'")
        kept, sieved = tuple(sorted(kept)), tuple(sorted(sieved))
        r = len(sieved)
        if reciprocal_sum is None:
            reciprocal_sum = sum((Fraction(1, p) for p in sieved), Fraction(0))
        l = 1 - 2 * reciprocal_sum
        if r == 0:
            L = Fraction(1)
        elif l > 0:
            L = Fraction(2 * r - 1) / l + 2
        else:
            L = None
        return cls(kept, sieved, r, l, L, variant)

    @property
    def W_d(self) -> int:
        return 1 << len(self.kept_primes)

    @property
    def multiplier(self) -> Fraction:
        if self.l <= 0:
            raise NonPositiveL(f"l = {self.l} <= 0 for sieved primes {self.sieved_primes}")
        return self.L if self.variant == "L" else self.l

    def to_json(self) -> dict:
        return {
            "kept_primes": [str(p) for p in self.kept_primes],
            "sieved_primes": [str(p) for p in self.sieved_primes],
            "r": self.r,
            "l": _frac_str(self.l),
            "L": _frac_str(self.L) if self.L is not None else None,
            "variant": self.variant,
        }


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def sieve_rhs(m1: int, m2: int, cfg: SieveConfig) -> Fraction:
    Wd = cfg.W_d
    return (m1 + m2) * Wd + (m1 + m2 + 2) * Wd * Wd * cfg.multiplier


def sieve_condition(q: int, m: int, m1: int, m2: int, cfg: SieveConfig) -> bool:
    """q^(m/2-2) > (m1+m2) W(d) + (m1+m2+2) W(d)^2 * (L or l)."""
    return pow_half_exceeds(q, m, sieve_rhs(m1, m2, cfg))


def best_sieve_search(q: int, m: int, m1: int, m2: int, fact: Factorization, variant: str = "L") -> SieveConfig | None:
    """Keep the k smallest primes of q^m - 1 and sieve the rest, for k = w down to 0."""
    primes = fact.primes
    recip = Fraction(0)
    for k in range(len(primes), -1, -1):
        if k < len(primes):
            recip += Fraction(1, primes[k])
        cfg = SieveConfig.make(primes[:k], primes[k:], variant, recip)
        if cfg.l > 0 and sieve_condition(q, m, m1, m2, cfg):
            return cfg
    return None


@dataclass(frozen=True)
class LowerBoundBreakdown:
    """bound = main_term - error_coeff * sqrt(radicand), with radicand = q^m.

    When m is even the square root is an integer and is folded into
    error_term; for odd m it stays as an isolated radical.
    """

    theta1: Fraction
    theta2: Fraction
    W1: int
    W2: int
    T: int
    R: int
    main_term: Fraction
    error_coeff: Fraction
    radicand: int
    error_term: Fraction | None = None

    @property
    def positive(self) -> bool:
        # main > c sqrt(R)  <=>  main > 0 and main^2 > c^2 R
        return self.main_term > 0 and self.main_term**2 > self.error_coeff**2 * self.radicand

    def is_at_most(self, n) -> bool:
        """bound <= n, exactly."""
        return exact_le_sqrt(self.main_term - Fraction(n), self.error_coeff, self.radicand)

    def __float__(self):
        return float(self.main_term) - float(self.error_coeff) * math.sqrt(self.radicand)

    def to_json(self) -> dict:
        return {
            "theta1": _frac_str(self.theta1),
            "theta2": _frac_str(self.theta2),
            "W1": self.W1,
            "W2": self.W2,
            "T": self.T,
            "R": self.R,
            "main_term": _frac_str(self.main_term),
            "error_coeff": _frac_str(self.error_coeff),
            "radicand": str(self.radicand),
            "error_term": _frac_str(self.error_term) if self.error_term is not None else None,
            "positive": self.positive,
            "approx": float(self),
        }


def lower_bound_N(q: int, m: int, m1: int, m2: int, fact_e1: Factorization, fact_e2: Factorization) -> LowerBoundBreakdown:
    """(th1 th2 / q^2) [q^m - q^(m/2) (q^2 (m1 W1 + m2 W2) + 2 q^2 T + q^2 (m1+m2) T)]."""
    th1 = arith_functions(fact_e1).theta
    th2 = arith_functions(fact_e2).theta
    W1, W2 = fact_e1.W, fact_e2.W
    T, R = W1 * W2, W1 + W2
    pref = th1 * th2 / q**2
    main = pref * q**m
    bracket = q**2 * (m1 * W1 + m2 * W2) + 2 * q**2 * T + q**2 * (m1 + m2) * T
    coeff = pref * bracket
    radicand = q**m
    err = None
    if m % 2 == 0:
        err = coeff * q ** (m // 2)
    return LowerBoundBreakdown(th1, th2, W1, W2, T, R, main, coeff, radicand, err)


@dataclass(frozen=True)
class DBoundParams:
    nu: float
    D: float
    M: int
    small_primes: tuple[int, ...]


def _exact_nu(nu) -> Fraction | None:
    fr = Fraction(nu)
    return fr if fr.denominator <= 64 else None


def d_bound(fact_M: Factorization, nu) -> tuple[DBoundParams, bool]:
    """D = prod over p <= 2^nu, p | M of 2 / p^(1/nu); check 2^w(M) <= D M^(1/nu).

    For nu with a small denominator a/b the check is the exact integer
    comparison 2^((w - t) a) * (prod p)^b <= M^b.  Otherwise it falls back to
    logarithms with an outward safety margin (may only err towards False).
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    M = fact_M.value
    limit = 2.0**float(nu)
    small = tuple(p for p in fact_M.primes if p <= limit)
    D = math.prod(2 / p ** (1 / float(nu)) for p in small)
    params = DBoundParams(float(nu), D, M, small)
    t = len(small)
    excess = fact_M.w - t
    fr = _exact_nu(nu)
    if fr is not None:
        a, b = fr.numerator, fr.denominator
        lhs = (1 << (excess * a)) * math.prod(small) ** b if excess >= 0 else None
        if lhs is None:
            return params, True
        return params, lhs <= M**b
    lhs_log = fact_M.w * math.log(2)
    rhs_log = math.log(D) + math.log(M) / float(nu)
    return params, lhs_log <= rhs_log - 1e-9 * (1 + abs(rhs_log))


def robin_rhs(n: int) -> float:
    ln = math.log(n)
    return ROBIN_CONST * ln / math.log(ln)


def robin_check(n: int, w: int | None = None) -> bool:
    """w(n) <= 1.385 ln n / ln ln n; the float side is shrunk so errors only cause False."""
    if n < 3:
        raise DomainError("Robin bound needs n >= 3")
    if w is None:
        w = factor(n).w
    rhs = robin_rhs(n)
    return w <= rhs * (1 - 1e-12) - 1e-12


def _for_m_gap(X: float, m_prime: int) -> float:
    """log LHS - log RHS of (x+1)^(1/2-2/m') >= 2^(4 + 2.77 ln x / ln ln x), with X = ln x."""
    log_x_plus_1 = X + math.log1p(math.exp(-X))
    return (0.5 - 2 / m_prime) * log_x_plus_1 - math.log(2) * (4 + FOR_M_CONST * X / math.log(X))


def global_threshold(m_prime: int, scan_cap: float = THRESHOLD_SCAN_CAP, grid: int = 200_000) -> float:
    """Least x' with the (m') inequality holding for every x in [x', scan_cap].

    Scans ln x on a uniform grid from ln 3 to ln scan_cap, takes the last
    failing grid point and bisects the crossing to 1e-9 relative accuracy
    in ln x.
    """
    if m_prime < 5:
        raise ValueError("m' must be >= 5")
    lo_X, hi_X = math.log(3.0) + 1e-9, math.log(scan_cap)
    step = (hi_X - lo_X) / grid
    last_fail = None
    for i in range(grid + 1):
        X = lo_X + i * step
        if _for_m_gap(X, m_prime) < 0:
            last_fail = i
    if last_fail is None:
        return 3.0
    if last_fail == grid:
        raise NoThreshold(f"inequality still fails at the scan cap {scan_cap:g}")
    a = lo_X + last_fail * step
    b = a + step
    for _ in range(200):
        mid = (a + b) / 2
        if _for_m_gap(mid, m_prime) < 0:
            a = mid
        else:
            b = mid
        if b - a < 1e-12 * b:
            break
    return math.exp(b)


def for_i_holds(m: int, i: int) -> bool:
    """(P_i + 1)^(1/2 - 2/m) > 2^(2(2+i)), raised to the 2m-th power."""
    _, P = primorial_and_primes(i)
    return (P + 1) ** (m - 4) > 1 << (4 * m * (2 + i))


def i_threshold(m: int, i_max: int = 10_000) -> int:
    """Smallest i for which the primorial inequality holds."""
    if m < 5:
        raise ValueError("m must be >= 5")
    for i in range(i_max + 1):
        if for_i_holds(m, i):
            return i
    raise NoThreshold(f"no i <= {i_max} for m = {m}")


def _smallest_prime_power_at_least(N: int) -> int:
    import gmpy2

    if N <= 2:
        return 2
    best = int(gmpy2.next_prime(N - 1))
    s = 2
    while (1 << s) <= best:
        c = integer_nth_root(N, s)
        if c**s < N:
            c += 1
        p = c if is_prime(c) else int(gmpy2.next_prime(c))
        best = min(best, p**s)
        s += 1
    return best


def smallest_prime_power_above_root(P: int, m: int) -> int:
    """Smallest prime power q with q^m > P."""
    return _smallest_prime_power_at_least(integer_nth_root(P, m) + 1)


@lru_cache(maxsize=None)
def _prime_reciprocal_tail(k: int, w: int) -> Fraction:
    ps = _first_primes(w)
    return sum((Fraction(1, p) for p in ps[k:w]), Fraction(0))


def _adversarial_cfg(w: int, k: int, variant: str) -> SieveConfig:
    ps = _first_primes(w)
    return SieveConfig.make(ps[:k], ps[k:], variant, _prime_reciprocal_tail(k, w))


def sieve_auto_pass(m: int, w: int, k: int, m1: int = 3, m2: int = 3, variant: str = "L") -> bool:
    """Certificate that every q with w(q^m - 1) = w passes the sieve with k kept primes.

    Worst case: q^m - 1 has exactly the first w primes and q is the smallest
    prime power with q^m > P_w.  Any real q has kept primes no smaller, a
    sieved reciprocal sum no larger and q no smaller, so passing here covers
    it.  The root floor(P_w^(1/m)) + 1 is tried first because it is a lower
    bound for that prime power; only if it fails is the prime power located.
    """
    if not 0 <= k <= w:
        raise ValueError("need 0 <= k <= w")
    cfg = _adversarial_cfg(w, k, variant)
    if cfg.l <= 0:
        return False
    _, P = primorial_and_primes(w)
    q_floor = integer_nth_root(P, m) + 1
    if sieve_condition(q_floor, m, m1, m2, cfg):
        return True
    q_min = smallest_prime_power_above_root(P, m)
    return q_min != q_floor and sieve_condition(q_min, m, m1, m2, cfg)


def auto_pass_any_k(m: int, w: int, m1: int = 3, m2: int = 3, variant: str = "L") -> int | None:
    """Some k for which sieve_auto_pass holds, trying the most promising k first."""
    if w == 0:
        return 0 if sieve_auto_pass(m, 0, 0, m1, m2, variant) else None
    _, P = primorial_and_primes(w)
    logq = math.log(integer_nth_root(P, m) + 1)
    lhs = (m / 2 - 2) * logq
    ps = _first_primes(w)
    tail = 0.0
    scored = []
    for k in range(w, -1, -1):
        if k < w:
            tail += 1 / ps[k]
        l = 1 - 2 * tail
        if l <= 1e-12:
            break
        r = w - k
        delta = ((2 * r - 1) / l + 2 if r else 1.0) if variant == "L" else l
        log_rhs = k * math.log(4) + math.log((m1 + m2 + 2) * delta + (m1 + m2) * 2.0**-k)
        scored.append((lhs - log_rhs, k))
    scored.sort(reverse=True)
    for score, k in scored[:3]:
        if sieve_auto_pass(m, w, k, m1, m2, variant):
            return k
    # float ordering is only a heuristic; fall back to the full exact scan
    if scored and scored[0][0] > -1e-6:
        for _, k in scored[3:]:
            if sieve_auto_pass(m, w, k, m1, m2, variant):
                return k
    return None
