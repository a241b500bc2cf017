import itertools
import random

import pytest

from primpairs import poly
from primpairs.ffield import build_field
from primpairs.ratfunc import (
    PoleAt,
    RationalFunction,
    count_roots_in_field,
    in_class_R,
    pair_setup,
    parse_ratfunc,
    roots_in_field,
    squarefree_decomposition,
)


def P(F, coeffs):
    return [F.coerce(c) for c in coeffs]


def test_cancellation():
    F = build_field(3, 1, 2)
    x = [F.zero, F.one]
    num = poly.mul(F, poly.mul(F, x, x), P(F, [1, 1]))
    den = poly.mul(F, x, P(F, [1, 1]))
    f = RationalFunction.make(F, num, den)
    assert list(f.num) == x and list(f.den) == [F.one]


def test_evaluate_and_pole():
    F = build_field(3, 1, 2)
    f = parse_ratfunc(F, "num=[1,0,1];den=[0,1]")
    assert f(F.one) == F.coerce(2)
    with pytest.raises(PoleAt):
        f(F.zero)
    assert f.degree_sum == 3


def test_parse_rejects_bad_grammar():
    F = build_field(2, 1, 3)
    for bad in ("x^2+1", "num=[1,a]", "num=[1];den=[0]", "num=[1.5]"):
        with pytest.raises((ValueError, ZeroDivisionError)):
            parse_ratfunc(F, bad)


def test_squarefree_examples():
    F2 = build_field(2, 1, 1)
    a = poly.mul(F2, P(F2, [0, 0, 0, 1]), P(F2, [1, 1]))  # x^3 (x+1)
    assert squarefree_decomposition(F2, a) == [(P(F2, [1, 1]), 1), (P(F2, [0, 1]), 3)]
    F5 = build_field(5, 1, 1)
    assert squarefree_decomposition(F5, P(F5, [0, 0, 1])) == [(P(F5, [0, 1]), 2)]
    F3 = build_field(3, 1, 1)
    sq = poly.mul(F3, P(F3, [1, 0, 1]), P(F3, [1, 0, 1]))
    assert squarefree_decomposition(F3, sq) == [(P(F3, [1, 0, 1]), 2)]


def _reconstruct(F, parts):
    out = [F.one]
    for part, e in parts:
        for _ in range(e):
            out = poly.mul(F, out, part)
    return out


@pytest.mark.parametrize("pse", [(2, 1, 3), (2, 2, 2), (3, 1, 2), (3, 2, 1), (5, 1, 2), (7, 1, 1)])
def test_squarefree_reconstruction_random(pse):
    F = build_field(*pse)
    rng = random.Random(hash(pse))
    for _ in range(60):
        a = [F.one]
        for _ in range(rng.randint(1, 4)):
            factor = [F.element(rng.randrange(F.order)) for _ in range(rng.randint(1, 2))] + [F.one]
            a = poly.mul(F, a, poly.trim(F, factor))
            if rng.random() < 0.3:  # force p-th powers
                for _ in range(F.p - 1):
                    a = poly.mul(F, a, poly.trim(F, factor))
        parts = squarefree_decomposition(F, a)
        assert _reconstruct(F, parts) == poly.monic(F, a)
        for (pa, _), (pb, _) in itertools.combinations(parts, 2):
            assert len(poly.gcd(F, pa, pb)) == 1
        for pa, _ in parts:
            assert len(poly.gcd(F, pa, poly.derivative(F, pa))) == 1


def test_class_R_examples():
    F = build_field(3, 1, 2)  # q^m - 1 = 8
    N = F.order - 1
    assert not in_class_R(parse_ratfunc(F, "num=[0,0,1]"), N)
    assert not in_class_R(parse_ratfunc(F, "num=[1,2,1];den=[0,0,1]"), N)  # ((x+1)/x)^2
    assert in_class_R(parse_ratfunc(F, "num=[1,0,1];den=[0,1]"), N)
    assert in_class_R(parse_ratfunc(build_field(3, 1, 2), "num=[1,0,1];den=[0,1]"), 80 // 10)


def _monic_polys(F, deg):
    for tail in itertools.product(range(F.order), repeat=deg):
        if deg and tail[0] == 0:
            continue  # keep x out of g; it is absorbed in x^j
        yield [F.element(i) for i in tail] + [F.one]


def _key(F, f):
    return tuple(F.index(c) for c in f.num), tuple(F.index(c) for c in f.den)


def _dth_powers(F, max_degree_sum):
    """Keys of g^d for monic, x-free g and prime d | q^m - 1, with deg-sum(g^d) bounded."""
    keys = set()
    for d in F.order_factorization.primes:
        for dn in range(max_degree_sum // d + 1):
            for dd in range(max_degree_sum // d - dn + 1):
                for gn in _monic_polys(F, dn):
                    for gd in _monic_polys(F, dd):
                        keys.add(_key(F, RationalFunction.make(F, gn, gd) ** d))
    return keys


def _brute_not_in_R(f, powers):
    """f = c x^j g^d: strip the monomial and the constant, then look g^d up."""
    F = f.field
    num, den = list(f.num), list(f.den)
    while F.is_zero(num[0]):
        num = num[1:]
    while F.is_zero(den[0]):
        den = den[1:]
    return _key(F, RationalFunction.make(F, poly.monic(F, num), den)) in powers


@pytest.mark.parametrize("pse", [(2, 1, 2), (2, 1, 3), (2, 1, 4), (3, 1, 1), (3, 1, 2), (5, 1, 1), (7, 1, 1), (2, 2, 1), (3, 1, 3)])
def test_class_R_matches_brute_force(pse):
    F = build_field(*pse)
    p = F.p
    powers = _dth_powers(F, 3)
    for nd in range(0, 4):
        for dd in range(0, 4 - nd):
            for num in itertools.product(range(p), repeat=nd + 1):
                if num[-1] == 0:
                    continue
                for den in itertools.product(range(p), repeat=dd):
                    f = RationalFunction.make(F, P(F, num), P(F, list(den) + [1]))
                    if f.is_zero:
                        continue
                    assert in_class_R(f, F.order - 1) == (not _brute_not_in_R(f, powers)), str(f)


def test_pair_setup_examples():
    F4 = build_field(2, 1, 2)
    x = parse_ratfunc(F4, "num=[0,1]")
    assert pair_setup(x, x).S == frozenset({F4.zero})
    F9 = build_field(3, 1, 2)
    f = parse_ratfunc(F9, "num=[1,0,1];den=[0,1]")
    st = pair_setup(f, x_of(F9))
    i = next(e for e in F9.elements() if e * e == F9.coerce(2))
    assert st.S == frozenset({F9.zero, i, -i})
    assert st.m1 == 3 and st.m2 == 1


def x_of(F):
    return parse_ratfunc(F, "num=[0,1]")


def test_root_count_matches_enumeration():
    F = build_field(2, 2, 3)
    rng = random.Random(5)
    for _ in range(40):
        a = poly.trim(F, [F.element(rng.randrange(F.order)) for _ in range(rng.randint(2, 6))])
        if len(a) <= 1:
            continue
        assert count_roots_in_field(F, a) == len(roots_in_field(F, a))


def test_evaluation_homomorphism():
    F = build_field(5, 1, 2)
    f = parse_ratfunc(F, "num=[1,2,1];den=[3,0,1]")
    h = parse_ratfunc(F, "num=[4,1];den=[1,1,1]")
    fh = f * h
    for e in F.elements():
        try:
            a, b = f(e), h(e)
        except PoleAt:
            continue
        assert fh(e) == a * b
