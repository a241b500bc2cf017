import cmath
import math

import numpy as np
import pytest

from primpairs.charsum import (
    TOL,
    AdditiveChar,
    BothZero,
    HypothesisViolated,
    MixedSumBoundParams,
    MultChar,
    case_row,
    characters_of_order,
    kloosterman,
    kloosterman_all,
    mixed_sum,
    rho_table,
    rho_via_characters,
    tau_table,
    tau_via_characters,
    weil_sum,
)
from primpairs.ffield import build_field
from primpairs.numth import divisor_factorizations, factor
from primpairs.ratfunc import pair_setup, parse_ratfunc
from primpairs.verify import small_fields


def test_additive_characters_basic():
    F = build_field(3, 2, 2)
    base, lifted = AdditiveChar(F, 1, "base"), AdditiveChar(F, 1, "lifted")
    assert base(0) == 1
    assert abs(sum(lifted(e) for e in F.elements())) < 1e-9
    assert abs(sum(base(a) for a in F.base.elements())) < 1e-9
    for e in F.elements():
        assert abs(abs(lifted(e)) - 1) < 1e-12


def test_order_three_character_on_f4():
    F = build_field(2, 1, 2)
    T = F.dlog_table()
    chi = MultChar(T, 3, 1)
    assert abs(chi(T.generator) - cmath.exp(2j * math.pi / 3)) < 1e-12
    assert chi(F.zero) == 0
    assert MultChar(T, 1, 0)(F.zero) == 1


def test_multiplicative_orthogonality():
    for t in small_fields(256):
        F = build_field(*t)
        T = F.dlog_table()
        for d in (dd.value for dd in divisor_factorizations(F.order_factorization)):
            for chi in characters_of_order(T, d):
                s = sum(chi(e) for e in F.nonzero_elements())
                assert abs(s - (F.order - 1 if d == 1 else 0)) < 1e-8


def test_rho_examples():
    F = build_field(2, 1, 2)
    T = F.dlog_table()
    for e in F.nonzero_elements():
        assert rho_via_characters(e, factor(1), T) == 1
    assert abs(rho_via_characters(T.generator, factor(3), T) - 1) < TOL
    assert abs(rho_via_characters(F.one, factor(3), T)) < TOL


def test_rho_table_matches_literal_form():
    for t in small_fields(128):
        F = build_field(*t)
        T = F.dlog_table()
        N1 = F.order - 1
        for e in divisor_factorizations(F.order_factorization):
            tab = rho_table(e, N1)
            for k in range(N1):
                assert abs(tab[k] - rho_via_characters(T.power_of_generator(k), e, T)) < 1e-9


def test_tau_examples_and_partition_of_unity():
    F = build_field(2, 2, 2)
    for e in F.elements():
        tr = F.rel_trace(e)
        vals = [tau_via_characters(e, a) for a in F.base.elements()]
        for a, v in enumerate(vals):
            assert abs(v - (a == tr)) < TOL
        assert abs(sum(vals) - 1) < TOL


def test_tau_table_is_delta():
    for q in (2, 3, 4, 5, 8, 9, 16, 27, 49, 64):
        from primpairs.numth import prime_power

        pp = prime_power(q)
        T = tau_table(build_field(pp.p, pp.s, 2))
        expect = np.zeros(q)
        expect[0] = 1
        assert np.abs(T - expect).max() < 1e-9


def test_kloosterman_examples():
    F = build_field(2, 1, 2)
    assert abs(kloosterman(F, 1, 1) - 3) < 1e-9
    for t in small_fields(64):
        G = build_field(*t)
        for u in range(1, G.q):
            assert abs(kloosterman(G, u, 0) + 1) < 1e-9
    with pytest.raises(BothZero):
        kloosterman(F, 0, 0)


def test_kloosterman_fft_matches_direct():
    for t in small_fields(32) + [(3, 2, 2), (2, 3, 2), (5, 1, 3)]:
        F = build_field(*t)
        K = kloosterman_all(F)
        for u in range(F.q):
            for v in range(F.q):
                if u or v:
                    assert abs(K[u, v] - kloosterman(F, u, v)) < 1e-7


def test_weil_examples():
    F = build_field(3, 1, 2)
    T = F.dlog_table()
    x = parse_ratfunc(F, "num=[0,1]")
    rec = weil_sum(x, MultChar(T, 2, 1))
    assert rec.passed and rec.magnitude < 1e-9 and rec.bound == 0
    f = parse_ratfunc(F, "num=[1,0,1];den=[0,1]")
    rec = weil_sum(f, MultChar(T, 2, 1))
    assert rec.passed and rec.magnitude <= 2 * 3 + TOL
    with pytest.raises(HypothesisViolated):
        weil_sum(parse_ratfunc(F, "num=[0,0,1]"), MultChar(T, 2, 1))


def test_case_rows():
    assert case_row(1, 1, 1, 0, 3, 3) == ("II/III kloosterman", 2)
    assert case_row(1, 5, 0, 0, 3, 4)[1] == 3
    assert case_row(1, 5, 1, 0, 3, 4)[1] == 4
    assert case_row(1, 5, 1, 1, 3, 4)[1] == 6
    assert case_row(5, 1, 0, 1, 3, 4)[1] == 3
    assert case_row(5, 7, 0, 0, 3, 4)[1] == 6
    assert case_row(5, 7, 1, 1, 3, 4)[1] == 9
    assert case_row(1, 1, 0, 0, 3, 3)[0] == "I"


def test_mixed_sum_case_I_and_kloosterman_rows():
    F = build_field(3, 1, 2)
    T = F.dlog_table()
    st = pair_setup(parse_ratfunc(F, "num=[1,0,1];den=[0,1]"), parse_ratfunc(F, "num=[0,1,0,1]"))
    one = MultChar(T, 1, 0)
    rec = mixed_sum(st, one, one, 0, 0)
    assert rec.passed and abs(rec.value - (F.order - len(st.S))) < 1e-9
    for u, v in ((1, 0), (0, 2), (1, 1)):
        rec = mixed_sum(st, one, one, u, v)
        assert rec.passed and rec.bound == 2 * 3


def test_mixed_sum_case_IV_example_over_f9():
    F = build_field(3, 1, 2)
    T = F.dlog_table()
    st = pair_setup(parse_ratfunc(F, "num=[1,0,1];den=[0,1]"), parse_ratfunc(F, "num=[0,1,0,1]"))
    # order-2 characters on both: f^4 g^4 = (x^2+1)^8 is degenerate
    with pytest.raises(HypothesisViolated) as info:
        mixed_sum(st, MultChar(T, 2, 1), MultChar(T, 2, 1), 1, 1)
    assert info.value.value.magnitude <= (3 + 3 + 2) * 3 + TOL
    rec = mixed_sum(st, MultChar(T, 2, 1), MultChar(T, 4, 1), 1, 1)
    assert rec.passed and rec.bound == (3 + 3 + 2) * 3


def test_mixed_sum_bound_params_validated():
    with pytest.raises(ValueError):
        MixedSumBoundParams(-1, 0, 0, 0)
    assert MixedSumBoundParams(1, 3, 1, 0).factor() == 3
