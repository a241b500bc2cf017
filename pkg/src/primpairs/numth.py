"""Exact integer number theory: primality, factorization, multiplicative functions.

Factorizations of q^m - 1 are split along cyclotomic values Phi_d(q) before
Pollard rho is applied, so rho only ever sees numbers of size about q^phi(m).
"""
from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

import gmpy2

__all__ = [
    "clear_factor_cache",
    "BudgetExceeded",
    "Factorization",
    "ArithFunctions",
    "PrimePower",
    "is_prime",
    "factor",
    "factor_qm_minus_1",
    "cyclotomic_value",
    "cyclotomic_coeffs",
    "arith_functions",
    "nth_prime",
    "primes_up_to",
    "primorial_and_primes",
    "prime_power",
    "integer_nth_root",
]

TRIAL_BOUND = 10**6
DEFAULT_BUDGET = 20_000_000
PROBABILISTIC_ROUNDS = 64

# Bases 2..41 are deterministic below this bound (Sorenson & Webster).
_DETERMINISTIC_LIMIT = 3317044064679887385961981
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class BudgetExceeded(ArithmeticError):
    """Raised when a composite cofactor resists factoring within the work budget."""

    def __init__(self, cofactor: int, budget: int):
        super().__init__(f"composite cofactor {cofactor} unresolved after {budget} rho steps")
        self.cofactor = cofactor
        self.budget = budget


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prod = 1
        prev = 1
        for p, e in self.factors:
            if p <= prev or e < 1 or not _is_prime_cached(p):
                raise ValueError(f"malformed factor list {self.factors!r}")
            prev = p
            prod *= p**e
        if prod != self.value:
            raise ValueError(f"factors multiply to {prod}, not {self.value}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def w(self) -> int:
        return len(self.factors)

    @property
    def W(self) -> int:
        return 1 << len(self.factors)

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    @classmethod
    def from_dict(cls, value: int, d: dict[int, int]) -> "Factorization":
        return cls(value, tuple(sorted((int(p), int(e)) for p, e in d.items() if e)))

    def restrict(self, primes) -> "Factorization":
        """Factorization of the largest divisor of value supported on ``primes``."""
        keep = set(primes)
        fs = tuple((p, e) for p, e in self.factors if p in keep)
        return Factorization(math.prod(p**e for p, e in fs), fs)

    def radical_of(self, primes) -> "Factorization":
        fs = tuple(sorted((p, 1) for p in set(primes)))
        return Factorization(math.prod(p for p, _ in fs), fs)


@dataclass(frozen=True)
class PrimePower:
    p: int
    s: int
    q: int

    def __post_init__(self):
        if not is_prime(self.p) or self.s < 1 or self.p**self.s != self.q:
            raise ValueError(f"{self.q} != {self.p}^{self.s} with {self.p} prime")


@dataclass(frozen=True)
class ArithFunctions:
    w: int
    W: int
    phi: int
    mu: int
    theta: Fraction
    radical: int
    divisors: tuple[int, ...] | None = field(default=None, repr=False)


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n: int) -> bool:
    """Miller-Rabin primality test.

    Deterministic for n < 3.3e24. Above that, 64 rounds with bases drawn from
    a generator seeded by n, so the answer is reproducible and a composite
    slips through with probability below 4**-64.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _DETERMINISTIC_LIMIT:
        bases = _DETERMINISTIC_BASES
    else:
        rng = random.Random(n)
        bases = [rng.randrange(2, n - 1) for _ in range(PROBABILISTIC_ROUNDS)]
    return all(_mr_round(n, d, s, a) for a in bases)


@lru_cache(maxsize=1 << 16)
def _is_prime_cached(n: int) -> bool:
    return is_prime(n)


@lru_cache(maxsize=None)
def primes_up_to(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytes(len(range(i * i, n + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def nth_prime(i: int) -> int:
    """The i-th prime, 1-indexed (nth_prime(1) == 2)."""
    if i < 1:
        raise ValueError("i must be >= 1")
    bound = 16
    while True:
        ps = primes_up_to(bound)
        if len(ps) >= i:
            return ps[i - 1]
        bound *= 2


def primorial_and_primes(i: int) -> tuple[int, int]:
    """Return (p_i, P_i): the i-th prime and the product of the first i primes.

    For i = 0 there is no p_0; it is reported as 1, and P_0 = 1.
    """
    if i < 0:
        raise ValueError("i must be >= 0")
    if i == 0:
        return 1, 1
    nth_prime(i)  # ensure the cached sieve is large enough
    ps = _first_primes(i)
    return ps[-1], math.prod(ps)


def _first_primes(i: int) -> tuple[int, ...]:
    bound = 16
    while len(primes_up_to(bound)) < i:
        bound *= 2
    return primes_up_to(bound)[:i]


def integer_nth_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    return int(gmpy2.iroot(gmpy2.mpz(n), k)[0])


def prime_power(q: int) -> PrimePower | None:
    """Decompose q as p^s, or return None when q is not a prime power."""
    if q < 2:
        return None
    for s in range(q.bit_length(), 0, -1):
        r = integer_nth_root(q, s)
        if r >= 2 and r**s == q and is_prime(r):
            return PrimePower(r, s, q)
    return None


def _brent(n: int, c: int, budget: int) -> tuple[int | None, int]:
    """One Brent-rho attempt with f(x) = x^2 + c; returns (factor or None, steps used)."""
    n = gmpy2.mpz(n)
    y, r, g, steps = gmpy2.mpz(2), 1, gmpy2.mpz(1), 0
    m = 128
    x = ys = y
    qprod = gmpy2.mpz(1)
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                qprod = qprod * abs(x - y) % n
            g = gmpy2.gcd(qprod, n)
            k += m
        steps += r
        if steps > budget:
            return None, steps
        r *= 2
    if g == n:
        # backtrack one step at a time
        while True:
            ys = (ys * ys + c) % n
            g = gmpy2.gcd(abs(x - ys), n)
            if g > 1:
                break
    if g == n:
        return None, steps
    return int(g), steps


def _split(n: int, budget: list[int]) -> int:
    """Find a nontrivial factor of composite n, charging rho steps to budget[0]."""
    if n % 2 == 0:
        return 2
    r = gmpy2.iroot(gmpy2.mpz(n), 2)
    if r[1]:
        return int(r[0])
    start = budget[0]
    for c in range(1, 64):
        g, used = _brent(n, c, budget[0])
        budget[0] -= used
        if g is not None:
            return g
        if budget[0] <= 0:
            break
    raise BudgetExceeded(n, start)


def _factor_into(n: int, out: dict[int, int], budget: list[int], trial: bool = True) -> None:
    if n == 1:
        return
    if trial:
        for p in primes_up_to(1000):
            if p * p > n:
                break
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out[p] = out.get(p, 0) + e
        n = _trial_tail(n, out)
    stack = [n] if n > 1 else []
    while stack:
        x = stack.pop()
        if x == 1:
            continue
        if is_prime(x):
            out[x] = out.get(x, 0) + 1
            continue
        d = _split(x, budget)
        stack.extend((d, x // d))


def _trial_tail(n: int, out: dict[int, int]) -> int:
    mpn = gmpy2.mpz(n)
    for p in _TRIAL_PRIMES:
        if p * p > mpn:
            break
        if gmpy2.is_divisible(mpn, p):
            e = 0
            while gmpy2.is_divisible(mpn, p):
                mpn //= p
                e += 1
            out[p] = out.get(p, 0) + e
    return int(mpn)


_TRIAL_PRIMES = tuple(p for p in primes_up_to(TRIAL_BOUND) if p > 1000)


def factor(n: int, budget: int = DEFAULT_BUDGET) -> Factorization:
    """Factor n: trial division up to 10^6, then Brent's Pollard rho.

    ``budget`` bounds the total number of rho steps; BudgetExceeded is raised
    with the stubborn composite cofactor when it runs out.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    out: dict[int, int] = {}
    _factor_into(n, out, [budget])
    return Factorization.from_dict(n, out)


def _divisors_of(n: int) -> list[int]:
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


@lru_cache(maxsize=None)
def cyclotomic_coeffs(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, constant term first.

    Computed as (x^n - 1) divided exactly by Phi_d for every proper divisor d.
    """
    num = [-1] + [0] * (n - 1) + [1]
    for d in _divisors_of(n)[:-1]:
        num = _exact_div(num, list(cyclotomic_coeffs(d)))
    return tuple(num)


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    # b is monic
    a = a[:]
    db = len(b) - 1
    quot = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        quot[i - db] = c
        if c:
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    if any(a[:db]):
        raise ArithmeticError("inexact cyclotomic division")
    return quot


def cyclotomic_value(n: int, q: int) -> int:
    val = 0
    for c in reversed(cyclotomic_coeffs(n)):
        val = val * q + c
    return val


class _Memo:
    """Insert-if-absent cache shared by concurrent callers."""

    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()

    def get(self, key):
        return self._data.get(key)

    def put(self, key, value):
        with self._lock:
            return self._data.setdefault(key, value)

    def clear(self):
        with self._lock:
            self._data.clear()


_QM_MEMO = _Memo()


def clear_factor_cache() -> None:
    _QM_MEMO.clear()


def factor_qm_minus_1(q: int, m: int, budget: int = DEFAULT_BUDGET) -> Factorization:
    """Factor q^m - 1 via its cyclotomic pieces Phi_d(q), d | m."""
    if q < 2 or m < 1:
        raise ValueError("need q >= 2, m >= 1")
    hit = _QM_MEMO.get((q, m))
    if hit is not None:
        return hit
    out: dict[int, int] = {}
    remaining = [budget]
    for d in _divisors_of(m):
        _factor_into(cyclotomic_value(d, q), out, remaining)
    return _QM_MEMO.put((q, m), Factorization.from_dict(q**m - 1, out))


def arith_functions(fact: Factorization, with_divisors: bool = False) -> ArithFunctions:
    """w, W, phi, mu, theta = phi/n, radical and (optionally) all divisors."""
    phi = 1
    for p, e in fact.factors:
        phi *= (p - 1) * p ** (e - 1)
    if any(e > 1 for _, e in fact.factors):
        mu = 0
    else:
        mu = -1 if fact.w % 2 else 1
    divisors = None
    if with_divisors:
        if fact.w > 20:
            raise ValueError("divisor list requested for too many primes")
        divisors = tuple(sorted(
            math.prod(p**k for (p, _), k in zip(fact.factors, ks))
            for ks in product(*(range(e + 1) for _, e in fact.factors))
        ))
    return ArithFunctions(
        w=fact.w,
        W=fact.W,
        phi=phi,
        mu=mu,
        theta=Fraction(phi, fact.value),
        radical=math.prod(fact.primes),
        divisors=divisors,
    )


def divisor_factorizations(fact: Factorization):
    """Yield a Factorization for every divisor of fact.value."""
    for ks in product(*(range(e + 1) for _, e in fact.factors)):
        fs = tuple((p, k) for (p, _), k in zip(fact.factors, ks) if k)
        yield Factorization(math.prod(p**k for p, k in fs), fs)
