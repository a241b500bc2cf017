import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from primpairs.bounds import (
    DomainError,
    NonPositiveL,
    SieveConfig,
    auto_pass_any_k,
    base_condition,
    best_sieve_search,
    d_bound,
    global_threshold,
    i_threshold,
    lower_bound_N,
    new_suff,
    robin_check,
    sieve_auto_pass,
    sieve_condition,
    sieve_rhs,
    smallest_prime_power_above_root,
    suff_conditions,
)
from primpairs.numth import BudgetExceeded, factor, factor_qm_minus_1, primorial_and_primes, prime_power


def test_base_condition_examples():
    v = base_condition(3, 10, 3, 3, 1, 1)
    assert v.passed and v.margin == 729 - 196
    f = factor_qm_minus_1(2, 9)
    assert not base_condition(2, 9, 3, 3, f.W, f.W).passed


def test_base_condition_margin_flips_at_equality():
    # W1 = W2 = 1, m1 = m2 = 3: rhs = 14 and 14^(6/2-2) = 14 exactly
    assert base_condition(14, 6, 3, 3, 1, 1).margin == 0
    assert not base_condition(14, 6, 3, 3, 1, 1).passed
    assert base_condition(15, 6, 3, 3, 1, 1).passed
    assert not base_condition(13, 6, 3, 3, 1, 1).passed


def test_suff_examples():
    assert not suff_conditions(2, 9, 3, 3, 2)["new_suff"]
    assert not suff_conditions(2, 24, 3, 3, 6)["new_suff"]
    assert not new_suff(2, 9, 2) and not new_suff(2, 24, 6)


@given(st.integers(2, 500), st.integers(5, 60), st.integers(0, 30))
@settings(max_examples=400, deadline=None)
def test_suff_equals_new_suff_for_three_three(q, m, w):
    d = suff_conditions(q, m, 3, 3, w)
    assert d["suff"] == d["new_suff"] == new_suff(q, m, w)


def test_sieve_config_arithmetic():
    c = SieveConfig.make([2, 3], [5, 7])
    assert c.l == Fraction(11, 35) and c.L == Fraction(127, 11)
    bad = SieveConfig.make([2], [3, 5])
    assert bad.l == Fraction(-1, 15)
    with pytest.raises(NonPositiveL):
        sieve_condition(10**9, 20, 3, 3, bad)
    z = SieveConfig.make([2, 3], [])
    assert z.l == 1 and z.L == 1
    assert c.to_json()["l"] == "11/35"


def test_r_zero_matches_base_condition():
    rng = random.Random(2)
    for _ in range(100):
        q = rng.choice([2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32])
        m = rng.randint(5, 24)
        f = factor_qm_minus_1(q, m)
        cfg = SieveConfig.make(f.primes, [])
        assert sieve_condition(q, m, 3, 3, cfg) == base_condition(q, m, 3, 3, f.W, f.W).passed


def test_variant_dominance():
    rng = random.Random(4)
    for _ in range(300):
        primes = sorted(rng.sample([11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53], rng.randint(1, 4)))
        L = SieveConfig.make([2, 3], primes, "L")
        l_ = SieveConfig.make([2, 3], primes, "l")
        if L.l <= 0:
            continue
        assert sieve_rhs(3, 3, l_) < sieve_rhs(3, 3, L)


def test_best_sieve_search_examples():
    f = factor_qm_minus_1(2, 13)
    assert f.factors == ((8191, 1),)
    assert best_sieve_search(2, 13, 3, 3, f) is None
    f = factor_qm_minus_1(25, 9)
    cfg = best_sieve_search(25, 9, 3, 3, f)
    assert cfg is not None and sieve_condition(25, 9, 3, 3, cfg)
    # passing new_suff -> k = w immediately
    f = factor_qm_minus_1(1009, 12)
    assert new_suff(1009, 12, f.w)
    assert best_sieve_search(1009, 12, 3, 3, f).r == 0


def test_lower_bound_examples():
    one = factor(1)
    b = lower_bound_N(3, 10, 3, 3, one, one)
    assert b.error_term is not None
    assert b.main_term - b.error_term == Fraction(3**10 - 14 * 3**7, 9) == 3159
    f = factor_qm_minus_1(2, 9)
    assert not lower_bound_N(2, 9, 3, 3, f, f).positive


def test_lower_bound_sign_matches_base_condition_grid():
    rng = random.Random(9)
    for _ in range(300):
        q, m = rng.randint(2, 60), rng.randint(5, 30)
        w1, w2 = rng.randint(0, 6), rng.randint(0, 6)
        primes = [2, 3, 5, 7, 11, 13]
        e1 = factor(math.prod(primes[:w1]))
        e2 = factor(math.prod(primes[:w2]))
        lb = lower_bound_N(q, m, 3, 3, e1, e2)
        assert lb.positive == base_condition(q, m, 3, 3, e1.W, e2.W).passed


def test_d_bound_examples():
    params, ok = d_bound(factor(15), 2)
    assert ok and params.small_primes == (3,)
    assert abs(params.D - 2 / math.sqrt(3)) < 1e-12
    params, ok = d_bound(factor(1_000_003), 4)
    assert ok and params.D == 1


def test_d_bound_random():
    rng = random.Random(1)
    for _ in range(2000):
        M = rng.randint(1, 10**6)
        for nu in range(2, 9):
            assert d_bound(factor(M), nu)[1]


def test_robin_examples():
    assert robin_check(3)
    assert robin_check(510510)
    with pytest.raises(DomainError):
        robin_check(2)


def test_global_threshold():
    x = global_threshold(109)
    assert 3.6e32 <= x <= 4.0e32
    assert x < 2**109 - 1
    assert global_threshold(10_000) < x


def test_i_threshold():
    assert i_threshold(108) == 22
    prev = None
    for m in range(9, 109):
        v = i_threshold(m)
        if prev is not None:
            assert v <= prev
        prev = v


def test_i_threshold_96_by_primorial_oracle():
    # independent: compare the real inequality in high precision
    from mpmath import mp, mpf, power

    mp.dps = 80
    i = 1
    while True:
        _, P = primorial_and_primes(i)
        if power(mpf(P + 1), mpf(1) / 2 - mpf(2) / 96) > power(2, 2 * (2 + i)):
            break
        i += 1
    assert i_threshold(96) == i


def test_sieve_auto_pass_examples():
    assert sieve_auto_pass(9, 20, 6)
    assert not sieve_auto_pass(9, 2, 0)
    # w = k reduces to base_condition at q_min
    for w in (3, 8, 15):
        _, P = primorial_and_primes(w)
        q = smallest_prime_power_above_root(P, 9)
        assert sieve_auto_pass(9, w, w) == base_condition(q, 9, 3, 3, 2**w, 2**w).passed


def test_smallest_prime_power_above_root():
    for P, m in ((30, 2), (2310, 3), (510510, 4)):
        q = smallest_prime_power_above_root(P, m)
        assert q**m > P and prime_power(q) is not None
        assert all(prime_power(c) is None or c**m <= P for c in range(2, q))


def test_auto_pass_soundness_on_sampled_tail():
    # every sampled (q, m) whose w lies in a certified tail passes the direct per-q sieve
    rng = random.Random(13)
    checked = 0
    while checked < 20:
        m = rng.randint(20, 40)
        q = rng.randint(2, 300)
        if prime_power(q) is None:
            continue
        try:
            f = factor_qm_minus_1(q, m, budget=200_000)
        except BudgetExceeded:
            continue  # sampling only: skip hard cofactors
        if auto_pass_any_k(m, f.w) is None:
            continue
        assert new_suff(q, m, f.w) or best_sieve_search(q, m, 3, 3, f) is not None
        checked += 1
