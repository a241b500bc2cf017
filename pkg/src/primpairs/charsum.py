"""Additive and multiplicative characters on small fields and the sums built from them.

Everything here is floating point (complex128) and intended for fields small
enough to hold a full discrete-log table.  Bound checks use ``TOL``.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import poly
from .ffield import CapExceeded, DlogTable, ExtField, FieldElem
from .numth import Factorization, arith_functions, divisor_factorizations
from .ratfunc import PoleAt, RationalFunction, PairSetup, coprime_base, squarefree_decomposition

__all__ = [
    "TOL",
    "AdditiveChar",
    "MultChar",
    "MixedSumBoundParams",
    "BothZero",
    "HypothesisViolated",
    "char_eval",
    "characters_of_order",
    "rho_via_characters",
    "tau_via_characters",
    "rho_table",
    "tau_table",
    "kloosterman",
    "kloosterman_all",
    "weil_sum",
    "mixed_sum",
    "case_row",
    "BoundCheck",
]

TOL = 1e-6
log = logging.getLogger(__name__)


class BothZero(ValueError):
    pass


class HypothesisViolated(ValueError):
    """The character-sum bound does not apply; ``value`` still holds the sum."""

    def __init__(self, msg, value=None):
        super().__init__(msg)
        self.value = value


def _root_of_unity(num: int, den: int) -> complex:
    # exact angle reduction before calling exp
    num %= den
    return cmath.exp(2j * math.pi * num / den)


@dataclass(frozen=True)
class AdditiveChar:
    """psi_u: canonical character of F_q (flavor 'base') or its lift to F_{q^m} ('lifted')."""

    field: ExtField = field(repr=False)
    u: int = 1
    flavor: str = "lifted"

    def __call__(self, x) -> complex:
        F = self.field
        B = F.base
        if self.flavor == "base":
            t = B.abs_trace(B.mul(self.u, x))
        else:
            t = B.abs_trace(F.rel_trace(F.embed(self.u) * x))
        return _root_of_unity(t, F.p)


@dataclass(frozen=True)
class MultChar:
    """chi(gamma^t) = exp(2 pi i j t / d) with gcd(j, d) = 1."""

    table: DlogTable = field(repr=False)
    d: int = 1
    j: int = 0

    def __post_init__(self):
        N1 = self.table.field.order - 1
        if N1 % self.d:
            raise ValueError(f"order {self.d} does not divide {N1}")
        if self.d > 1 and math.gcd(self.j, self.d) != 1:
            raise ValueError("index not coprime to order")

    @property
    def trivial(self) -> bool:
        return self.d == 1

    @property
    def exponent(self) -> int:
        """k with chi = chi_gen^k, chi_gen the order-(q^m-1) character j=1."""
        return self.j * ((self.table.field.order - 1) // self.d) % (self.table.field.order - 1)

    def __call__(self, x: FieldElem) -> complex:
        if x.is_zero():
            return 1.0 + 0j if self.trivial else 0j
        if self.trivial:
            return 1.0 + 0j
        return _root_of_unity(self.j * self.table.dlog(x), self.d)


def characters_of_order(table: DlogTable, d: int) -> list[MultChar]:
    """All phi(d) characters of exact order d."""
    if d == 1:
        return [MultChar(table, 1, 0)]
    return [MultChar(table, d, j) for j in range(1, d) if math.gcd(j, d) == 1]


def char_eval(char, eps) -> complex:
    return char(eps)


def rho_via_characters(eps: FieldElem, e: Factorization, table: DlogTable) -> complex:
    """theta(e) * sum_{d | e} mu(d)/phi(d) * sum_{chi of order d} chi(eps)."""
    if eps.is_zero():
        raise ValueError("rho is defined on nonzero elements")
    total = 0j
    for dfact in divisor_factorizations(e):
        af = arith_functions(dfact)
        if af.mu == 0:
            continue
        inner = sum(chi(eps) for chi in characters_of_order(table, dfact.value))
        total += af.mu / af.phi * inner
    return float(arith_functions(e).theta) * total


def tau_via_characters(eps: FieldElem, a: int) -> complex:
    """(1/q) * sum_{u in F_q} psi_hat(u eps) * psi_tilde(-u a)."""
    F = eps.field
    B = F.base
    lifted = AdditiveChar(F, 1, "lifted")
    base = AdditiveChar(F, 1, "base")
    total = 0j
    for u in B.elements():
        total += lifted(F.embed(u) * eps) * base(B.neg(B.mul(u, a)))
    return total / F.q


def rho_table(e: Factorization, N1: int) -> np.ndarray:
    """rho_e(gamma^t) for t in [0, N1), vectorised over t.

    The inner sum over characters of order d is the Ramanujan sum c_d(t),
    which only depends on t mod d.
    """
    t = np.arange(N1, dtype=np.int64)
    total = np.zeros(N1, dtype=np.complex128)
    for dfact in divisor_factorizations(e):
        af = arith_functions(dfact)
        if af.mu == 0:
            continue
        d = dfact.value
        js = np.array([j for j in range(d) if math.gcd(j, d) == 1], dtype=np.int64)
        c = np.exp(2j * np.pi * np.outer(np.arange(d), js) / d).sum(axis=1)
        total += af.mu / af.phi * c[t % d]
    return float(arith_functions(e).theta) * total


def tau_table(F: ExtField) -> np.ndarray:
    """T[c] = (1/q) sum_u psi_tilde(u c) for every c in F_q.

    tau_a(eps) equals T[Tr(eps) - a], since psi_hat(u eps) = psi_tilde(u Tr eps).
    """
    p, s, q = F.p, F.s, F.q
    Bm = _trace_form(F)
    ud = _digit_array(np.arange(q, dtype=np.int64), p, s)
    left = ud @ Bm
    out = np.empty(q, dtype=np.complex128)
    for lo in range(0, q, 256):
        tr = (left @ ud[lo:lo + 256].T) % p  # tr[u, c] = Tr_abs(u c)
        out[lo:lo + 256] = np.exp(2j * np.pi * tr / p).sum(axis=0) / q
    return out


def kloosterman(F: ExtField, u: int, v: int) -> complex:
    """K(psi, u, v) = sum over nonzero eps of psi_hat(u eps + v / eps)."""
    if u == 0 and v == 0:
        raise BothZero("u and v both zero")
    psi = AdditiveChar(F, 1, "lifted")
    U, V = F.embed(u), F.embed(v)
    return sum(psi(U * e + V * e.inverse()) for e in F.nonzero_elements())


def _trace_form(F: ExtField) -> np.ndarray:
    """B[i, j] = Tr_{F_q/F_p}(y^(i+j)), so Tr_abs(a b) = digits(a) B digits(b)."""
    B = F.base
    p, s = F.p, F.s
    mat = np.zeros((s, s), dtype=np.int64)
    for i in range(s):
        for j in range(s):
            mat[i, j] = B.abs_trace(B.mul(p**i, p**j))
    return mat


def _digit_array(values: np.ndarray, p: int, s: int) -> np.ndarray:
    out = np.zeros((len(values), s), dtype=np.int64)
    v = values.copy()
    for i in range(s):
        out[:, i] = v % p
        v //= p
    return out


def kloosterman_all(F: ExtField) -> np.ndarray:
    """K(u, v) for every (u, v) in F_q^2, as a q x q complex array.

    The sum over eps is grouped by (Tr eps, Tr 1/eps) and the double character
    sum over that histogram is a 2s-dimensional DFT over F_p^(2s).
    """
    p, s, q = F.p, F.s, F.q
    t1 = np.empty(F.order - 1, dtype=np.int64)
    t2 = np.empty(F.order - 1, dtype=np.int64)
    for i, e in enumerate(F.nonzero_elements()):
        t1[i] = F.trace(e)
        t2[i] = F.trace(e.inverse())
    d1, d2 = _digit_array(t1, p, s), _digit_array(t2, p, s)
    hist = np.zeros((p,) * (2 * s), dtype=np.float64)
    np.add.at(hist, tuple(d1.T) + tuple(d2.T), 1.0)
    # sum_x hist[x] * zeta^<w, x> = p^(2s) * ifftn(hist)[w]
    spec = np.fft.ifftn(hist) * float(p ** (2 * s))
    Bm = _trace_form(F)
    ud = _digit_array(np.arange(q, dtype=np.int64), p, s)
    w = (ud @ Bm) % p  # w[u] = B^T digits(u); B symmetric
    idx_u = tuple(w.T)
    out = np.empty((q, q), dtype=np.complex128)
    for v in range(q):
        out[:, v] = spec[idx_u + tuple(np.broadcast_to(w[v], (q, s)).T)]
    return out


@dataclass
class BoundCheck:
    lemma: str
    field: dict
    params: dict
    value: complex
    bound: float
    passed: bool | None  # None when the hypothesis failed and nothing was asserted
    note: str = ""

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    def record(self) -> dict:
        return {
            "lemma": self.lemma,
            "field": self.field,
            "params": self.params,
            "magnitude": self.magnitude,
            "bound": self.bound,
            "pass": self.passed,
            "note": self.note,
        }


def _is_dth_power_form(f: RationalFunction, d: int) -> bool:
    """f = c * h^d for a rational h: every multiplicity divisible by d."""
    mults = [abs(e) for _, e in f.multiplicities()]
    return all(e % d == 0 for e in mults)


def weil_sum(f: RationalFunction, chi: MultChar) -> BoundCheck:
    """sum over eps with f(eps) finite of chi(f(eps)), checked against (deg rad - 1) q^(m/2)."""
    F = f.field
    total = 0j
    for e in F.elements():
        try:
            y = f(e)
        except PoleAt:
            continue
        total += chi(y)
    bound = (f.radical_degree() - 1) * math.sqrt(F.order)
    rec = BoundCheck(
        "weil", F.describe(), {"f": str(f), "d": chi.d, "j": chi.j}, total, bound, None
    )
    if chi.trivial or _is_dth_power_form(f, chi.d):
        rec.note = "hypothesis violated"
        log.info("weil hypothesis violated for f=%s d=%d", f, chi.d)
        raise HypothesisViolated(f"{f} is a constant times a {chi.d}-th power", rec)
    rec.passed = rec.magnitude <= bound + TOL
    return rec


@dataclass(frozen=True)
class MixedSumBoundParams:
    deg_g_inf: int
    l0: int
    l1: int
    l2: int

    def __post_init__(self):
        if min(self.deg_g_inf, self.l0, self.l1, self.l2) < 0:
            raise ValueError("negative mixed-sum parameter")

    def factor(self) -> int:
        return self.deg_g_inf + self.l0 + self.l1 - self.l2 - 2


def case_row(d1: int, d2: int, u: int, v: int, m1: int, m2: int) -> tuple[str, float]:
    """The bound multiplier of q^(m/2) for chi_{f,g}(d1, d2, u, v)."""
    ru, rv = u != 0, v != 0
    if d1 == 1 and d2 == 1:
        if not (ru or rv):
            return "I", float("nan")
        return "II/III kloosterman", 2
    if d1 == 1:
        base, case = m2, "II"
    elif d2 == 1:
        base, case = m1, "III"
    else:
        base, case = m1 + m2, "IV"
    if not ru and not rv:
        return case, base - 1
    if ru and rv:
        return case, base + 2
    return case, base


def _combined_structure(setup: PairSetup, k1: int, k2: int, N1: int):
    """Coprime base of f, g with the combined exponents k1*a + k2*b per element."""
    F = setup.f.field
    parts = {}
    for name, rf in (("f", setup.f), ("g", setup.g)):
        for num_or_den, sign in ((rf.num, 1), (rf.den, -1)):
            for part, e in squarefree_decomposition(F, list(num_or_den)) if len(num_or_den) > 1 else []:
                parts.setdefault(name, []).append((part, sign * e))
    everything = [p for lst in parts.values() for p, _ in lst]
    base = coprime_base(F, everything)
    out = []
    for b in base:
        ex = {}
        for name in ("f", "g"):
            tot = 0
            for part, e in parts.get(name, []):
                if not poly.mod(F, part, b):
                    tot += e
            ex[name] = tot
        out.append((b, k1 * ex["f"] + k2 * ex["g"]))
    return out


def mixed_sum(setup: PairSetup, chi1: MultChar, chi2: MultChar, u: int, v: int) -> BoundCheck:
    """chi_{f,g}(d1, d2, u, v) = sum_{eps not in S} chi1(f eps) chi2(g eps) psi_hat(u eps + v/eps)."""
    F = setup.f.field
    psi = AdditiveChar(F, 1, "lifted")
    U, V = F.embed(u), F.embed(v)
    total = 0j
    for e in F.elements():
        if e in setup.S:
            continue
        total += chi1(setup.f(e)) * chi2(setup.g(e)) * psi(U * e + V * e.inverse())
    d1, d2 = chi1.d, chi2.d
    case, mult = case_row(d1, d2, u, v, setup.m1, setup.m2)
    N1 = F.order - 1
    params = {"d1": d1, "d2": d2, "j1": chi1.j, "j2": chi2.j, "u": u, "v": v,
              "m1": setup.m1, "m2": setup.m2, "case": case}
    if case == "I":
        bound = F.order - (setup.m1 + setup.m2 + 1)
        rec = BoundCheck("case-I", F.describe(), params, total, bound, None)
        rec.passed = abs(total.imag) <= TOL and total.real >= bound - TOL
        return rec
    bound = mult * math.sqrt(F.order)
    rec = BoundCheck("case-" + case, F.describe(), params, total, bound, None)
    structure = _combined_structure(setup, chi1.exponent, chi2.exponent, N1)
    lp = _mixed_bound_params(F, structure, u, v)
    rec.params["mixed_bound"] = lp.__dict__ | {"bound_factor": lp.factor()}
    if not (d1 == 1 and d2 == 1) and all(c % N1 == 0 for _, c in structure):
        rec.note = "hypothesis violated: f^k1 g^k2 is a (q^m-1)-th power times a constant"
        log.info("mixed sum degenerate: %s", params)
        raise HypothesisViolated(rec.note, rec)
    rec.passed = rec.magnitude <= bound + TOL
    return rec


def _mixed_bound_params(F, structure, u: int, v: int) -> MixedSumBoundParams:
    deg_inf = int(u != 0) + int(v != 0)
    l0 = sum(len(b) - 1 for b, c in structure if c != 0)
    poles = [b for b, c in structure if c < 0]
    add_zero_pole = [F.embed(v), F.zero, F.embed(u)]  # u x^2 + v
    special = poly.trim(F, add_zero_pole)
    if v != 0:
        special = poly.mul(F, special, [F.zero, F.one]) if special else [F.zero, F.one]
    l2 = 0
    for b in poles:
        if special:
            l2 += len(poly.gcd(F, b, special)) - 1
    return MixedSumBoundParams(deg_inf, l0, deg_inf, l2)
