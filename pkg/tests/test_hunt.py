import json

import pytest
import sympy

from primpairs.bounds import best_sieve_search, new_suff
from primpairs.hunt import (
    HuntPlan,
    TailNotClosed,
    decide_pair,
    hunt_all,
    hunt_m,
    prime_power_iter,
    reference_exceptions,
    tail_closure,
)
from primpairs.numth import Factorization


def test_reference_set():
    ref = reference_exceptions()
    assert len(ref) == 34
    assert (2, 9) in ref and (23, 10) in ref and (2, 24) in ref
    assert all(9 <= m <= 24 for _, m in ref)


def test_prime_power_iter():
    assert [pp.q for pp in prime_power_iter(10)] == [2, 3, 4, 5, 7, 8, 9]
    assert [pp.q for pp in prime_power_iter(2)] == [2]
    assert list(prime_power_iter(1)) == []
    pps = list(prime_power_iter(100))
    assert len(pps) == 35
    assert all(pp.p**pp.s == pp.q for pp in pps)


@pytest.mark.parametrize("kw", [dict(m_from=4), dict(m_from=20, m_to=10), dict(m_to=109), dict(m1=0), dict(variant="x")])
def test_plan_validation(kw):
    with pytest.raises(ValueError):
        HuntPlan(**kw)


def test_tail_not_closed():
    with pytest.raises(TailNotClosed):
        tail_closure(9, HuntPlan(w_cap=1))


def test_hunt_m_outside_range():
    with pytest.raises(ValueError):
        hunt_m(30, HuntPlan(m_from=9, m_to=12))


def test_hunt_m11():
    verdicts, audit = hunt_m(11, HuntPlan())
    assert {v.q for v in verdicts if v.status == "exceptional"} == {2, 3, 4}
    assert not [v for v in verdicts if v.status == "unresolved"]
    assert audit.w_star > 0 and audit.explicit_q == len(verdicts)


def test_hunt_m50_empty():
    verdicts, _ = hunt_m(50, HuntPlan())
    assert not [v for v in verdicts if v.status != "pass"]


def test_q2_band():
    plan = HuntPlan(m_from=13, m_to=24, q_only=(2,))
    rep = hunt_all(plan)
    assert rep.exceptional == [(2, m) for m in (13, 14, 15, 16, 18, 20, 24)]
    assert rep.clean


def test_thread_determinism():
    base = dict(m_from=11, m_to=14, q_only=(2, 3, 4, 5))
    a = hunt_all(HuntPlan(threads=1, **base)).to_json()
    b = hunt_all(HuntPlan(threads=2, **base)).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


@pytest.mark.parametrize("q,m", [(2, 13), (3, 11), (4, 11), (7, 12), (11, 12)])
def test_exceptional_recheck_with_sympy(q, m):
    fac = sympy.factorint(q**m - 1)
    fact = Factorization(q**m - 1, tuple(sorted((int(p), int(e)) for p, e in fac.items())))
    assert not new_suff(q, m, len(fac))
    assert best_sieve_search(q, m, 3, 3, fact) is None
    assert decide_pair(q, m, HuntPlan()).status == "exceptional"


def test_l_variant_only_passes_more():
    lform = hunt_all(HuntPlan(m_from=11, m_to=12, variant="l"))
    big = hunt_all(HuntPlan(m_from=11, m_to=12))
    assert set(lform.exceptional) <= set(big.exceptional)
