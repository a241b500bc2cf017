"""Rational functions over F_{q^m}: reduction, evaluation, squarefree structure."""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from functools import reduce

from . import poly
from .ffield import CapExceeded, ExtField, FieldElem
from .numth import Factorization

__all__ = [
    "PoleAt",
    "RationalFunction",
    "PairSetup",
    "squarefree_decomposition",
    "coprime_base",
    "in_class_R",
    "pair_setup",
    "parse_ratfunc",
    "degree_sum",
    "ROOT_CAP",
]

ROOT_CAP = 1 << 20


class PoleAt(ZeroDivisionError):
    def __init__(self, eps):
        super().__init__(f"pole at {eps!r}")
        self.eps = eps


def _x_power_split(F, a):
    """Split a = x^k * rest with rest(0) != 0."""
    k = 0
    while k < len(a) and F.is_zero(a[k]):
        k += 1
    return k, a[k:]


@dataclass(frozen=True)
class RationalFunction:
    field: ExtField = field(repr=False)
    num: tuple
    den: tuple

    @classmethod
    def make(cls, F: ExtField, num, den=None) -> "RationalFunction":
        """Reduce num/den: cancel the gcd and make den monic."""
        num = poly.trim(F, [F.coerce(c) for c in num])
        den = poly.trim(F, [F.coerce(c) for c in (den if den is not None else [1])])
        if not den:
            raise ZeroDivisionError("zero denominator")
        g = poly.gcd(F, num, den) if num else list(den)
        if num:
            num = poly.divmod_(F, num, g)[0]
            den = poly.divmod_(F, den, g)[0]
        else:
            den = [F.one]
        lead = den[-1]
        num = poly.scale(F, num, F.inv(lead))
        den = poly.monic(F, den)
        return cls(F, tuple(num), tuple(den))

    @property
    def degree_sum(self) -> int:
        return degree_sum(self)

    @property
    def is_zero(self) -> bool:
        return not self.num

    def __call__(self, eps: FieldElem) -> FieldElem:
        return self.evaluate(eps)

    def evaluate(self, eps: FieldElem) -> FieldElem:
        F = self.field
        d = poly.evaluate(F, list(self.den), eps)
        if d.is_zero():
            raise PoleAt(eps)
        return poly.evaluate(F, list(self.num), eps) / d

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        F = self.field
        return RationalFunction.make(
            F, poly.mul(F, list(self.num), list(other.num)), poly.mul(F, list(self.den), list(other.den))
        )

    def __pow__(self, k: int) -> "RationalFunction":
        F = self.field
        if k < 0:
            if self.is_zero:
                raise ZeroDivisionError("negative power of zero function")
            return RationalFunction.make(F, self.den, self.num) ** (-k)
        out = RationalFunction.make(F, [F.one])
        for _ in range(k):
            out = out * self
        return out

    def multiplicities(self) -> list[tuple[tuple, int]]:
        """Signed squarefree structure: (monic part, +mult for num / -mult for den)."""
        F = self.field
        out = [(tuple(p), e) for p, e in squarefree_decomposition(F, list(self.num))]
        out += [(tuple(p), -e) for p, e in squarefree_decomposition(F, list(self.den))]
        return out

    def radical_degree(self) -> int:
        """Number of distinct zeros and poles in the algebraic closure (finite ones)."""
        return sum(len(p) - 1 for p, _ in self.multiplicities())

    def to_json(self) -> dict:
        return {"num": [list(c.c) for c in self.num], "den": [list(c.c) for c in self.den]}

    def __str__(self):
        return f"({_fmt(self.num)})/({_fmt(self.den)})"


def _fmt(a) -> str:
    if not a:
        return "0"
    terms = []
    for i, c in enumerate(a):
        if c.is_zero():
            continue
        coef = str(c.c[0]) if not any(c.c[1:]) else str(list(c.c))
        mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if mono and coef == "1":
            terms.append(mono)
        else:
            terms.append(coef + ("*" + mono if mono else ""))
    return " + ".join(reversed(terms))


def degree_sum(f: RationalFunction) -> int:
    """deg(num) + deg(den) of the reduced representative.

    This is the one place the reading of "degree sum" lives; swap here for
    an alternative such as max(deg num, deg den).
    """
    return (len(f.num) - 1 if f.num else 0) + (len(f.den) - 1)


def _pth_root(F: ExtField, a):
    """Coefficientwise inverse Frobenius of a polynomial in x^p."""
    p = F.p
    k = F.s * F.m  # |F_{q^m}| = p^k, so c^(p^(k-1)) is the p-th root of c
    e = p ** (k - 1)
    return [a[i] ** e for i in range(0, len(a), p)]


def squarefree_decomposition(F: ExtField, a) -> list[tuple[list, int]]:
    """Yun/Musser decomposition in characteristic p.

    Returns [(part, multiplicity)] with monic, pairwise coprime, squarefree
    parts sorted by multiplicity, so that prod part^mult == a / lead(a).
    """
    a = poly.trim(F, a)
    if not a:
        raise ValueError("squarefree decomposition of the zero polynomial")
    a = poly.monic(F, a)
    acc: dict[int, list] = {}
    _sqf(F, a, 1, acc)
    return [(acc[e], e) for e in sorted(acc)]


def _sqf(F, a, scale_, acc):
    if len(a) <= 1:
        return
    da = poly.derivative(F, a)
    if not da:
        _sqf(F, _pth_root(F, a), scale_ * F.p, acc)
        return
    c = poly.gcd(F, a, da)
    w = poly.divmod_(F, a, c)[0]
    i = 1
    while len(w) > 1:
        y = poly.gcd(F, w, c)
        z = poly.divmod_(F, w, y)[0]
        if len(z) > 1:
            e = i * scale_
            acc[e] = poly.mul(F, acc[e], z) if e in acc else z
        i += 1
        w = y
        c = poly.divmod_(F, c, y)[0]
    if len(c) > 1:
        _sqf(F, _pth_root(F, c), scale_ * F.p, acc)


def coprime_base(F: ExtField, polys) -> list:
    """Pairwise coprime monic polynomials whose products generate the inputs."""
    base: list = []
    for p in polys:
        p = poly.monic(F, poly.trim(F, list(p)))
        if len(p) <= 1:
            continue
        todo = [p]
        while todo:
            cur = todo.pop()
            for i, b in enumerate(base):
                g = poly.gcd(F, cur, b)
                if len(g) > 1:
                    base.pop(i)
                    rest_b = poly.divmod_(F, b, g)[0]
                    rest_c = poly.divmod_(F, cur, g)[0]
                    todo.extend(x for x in (g, rest_b, rest_c) if len(x) > 1)
                    # g may still share factors with other entries; re-run it
                    break
            else:
                base.append(cur)
    return base


def valuation(F, a, b) -> int:
    """Largest k with b^k | a (b nonconstant)."""
    k = 0
    while a:
        q_, r = poly.divmod_(F, a, b)
        if r:
            break
        a, k = q_, k + 1
    return k


def _non_x_multiplicities(f: RationalFunction) -> list[int]:
    F = f.field
    out = []
    for a in (f.num, f.den):
        _, rest = _x_power_split(F, list(a))
        if len(rest) > 1:
            out += [e for _, e in squarefree_decomposition(F, rest)]
    return out


def in_class_R(f: RationalFunction, qm_minus_1: Factorization | int) -> bool:
    """False iff f = c * x^j * g^d for some d > 1 dividing q^m - 1."""
    n = qm_minus_1.value if isinstance(qm_minus_1, Factorization) else qm_minus_1
    if f.is_zero:
        return False
    mults = _non_x_multiplicities(f)
    if not mults:
        return False
    M = reduce(math.gcd, mults)
    return math.gcd(M, n) == 1


@dataclass(frozen=True)
class PairSetup:
    f: RationalFunction
    g: RationalFunction
    S: frozenset
    m1: int
    m2: int

    def describe(self) -> dict:
        F = self.f.field
        return {
            "f": str(self.f),
            "g": str(self.g),
            "m1": self.m1,
            "m2": self.m2,
            "S": sorted(F.index(e) for e in self.S),
        }


def roots_in_field(F: ExtField, a, cap: int = ROOT_CAP) -> set:
    a = poly.trim(F, list(a))
    if len(a) <= 1:
        return set()
    if F.order > cap:
        raise CapExceeded(f"root enumeration over {F.order} elements exceeds cap {cap}")
    return {e for e in F.elements() if poly.evaluate(F, a, e).is_zero()}


def count_roots_in_field(F: ExtField, a) -> int:
    """deg gcd(a, x^(q^m) - x): number of distinct roots in F_{q^m}."""
    a = poly.monic(F, poly.trim(F, list(a)))
    if len(a) <= 1:
        return 0
    x = [F.zero, F.one]
    h = poly.powmod(F, x, F.order, a)
    return len(poly.gcd(F, a, poly.sub(F, h, x))) - 1


def pair_setup(f: RationalFunction, g: RationalFunction, cap: int = ROOT_CAP) -> PairSetup:
    F = f.field
    S = {F.zero}
    for a in (f.num, f.den, g.num, g.den):
        S |= roots_in_field(F, a, cap)
    return PairSetup(f, g, frozenset(S), degree_sum(f), degree_sum(g))


_GRAMMAR = re.compile(r"^\s*num\s*=\s*(\[[^\]]*\])\s*(?:;\s*den\s*=\s*(\[[^\]]*\])\s*)?;?\s*$")


def parse_ratfunc(F: ExtField, text: str) -> RationalFunction:
    """Parse ``num=[c0,c1,...];den=[d0,d1,...]``.

    Coefficients are integers, constant term first, reduced mod p. ``den``
    defaults to [1].  Example: ``num=[1,0,1];den=[0,1]`` is (x^2+1)/x.
    """
    mt = _GRAMMAR.match(text)
    if not mt:
        raise ValueError(f"bad rational function {text!r}; expected num=[..];den=[..]")
    num = json.loads(mt.group(1))
    den = json.loads(mt.group(2)) if mt.group(2) else [1]
    if not all(isinstance(c, int) for c in num + den):
        raise ValueError("coefficients must be integers")
    return RationalFunction.make(F, [F.coerce(c) for c in num], [F.coerce(c) for c in den])
