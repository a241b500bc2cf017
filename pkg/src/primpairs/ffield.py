"""Finite field towers F_p <= F_q <= F_{q^m}.

Base-field elements are plain ints in [0, q): the digits of the int in base p
are the coefficients of the residue polynomial in y, constant term first.
Extension elements are :class:`FieldElem` values holding m base-field ints.
Moduli are the lexicographically smallest monic irreducibles, so the same
(p, s, m) always produce the same representation.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

from . import poly
from .numth import Factorization, factor, factor_qm_minus_1, is_prime

__all__ = [
    "BaseField",
    "ExtField",
    "FieldElem",
    "DlogTable",
    "CapExceeded",
    "ZeroElement",
    "build_field",
    "DLOG_CAP",
]

DLOG_CAP = 1 << 20
_ADD_TABLE_MAX = 1024


class CapExceeded(RuntimeError):
    pass


class ZeroElement(ValueError):
    pass


class _PrimeField:
    """Coefficient ring F_p used while searching for the base modulus."""

    def __init__(self, p):
        self.p = p
        self.zero, self.one = 0, 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(a, self.p - 2, self.p)

    @staticmethod
    def is_zero(a):
        return a == 0


def _first_irreducible(F, deg: int, field_size: int, digits_of) -> tuple:
    """Smallest monic irreducible of degree ``deg`` over F.

    Candidates are ordered by the integer whose base-|F| digits are the
    non-leading coefficients, constant term least significant.
    """
    for idx in range(field_size**deg):
        f = list(digits_of(idx, deg)) + [F.one]
        if deg > 1 and F.is_zero(f[0]):
            continue
        if poly.is_irreducible(F, f, field_size):
            return tuple(f)
    raise ArithmeticError("no irreducible polynomial found")


class BaseField:
    """F_q = F_p[y]/(modulus), elements encoded as ints in [0, q)."""

    def __init__(self, p: int, s: int):
        if not is_prime(p) or s < 1:
            raise ValueError(f"bad base field parameters p={p}, s={s}")
        self.p, self.s, self.q = p, s, p**s
        self.zero, self.one = 0, 1
        Fp = _PrimeField(p)
        if s == 1:
            self.modulus = (0, 1)
        else:
            self.modulus = _first_irreducible(Fp, s, p, lambda i, n: _digits(i, p, n))
        self._fp = Fp
        if s > 1:
            self._build_log_tables()
            if p != 2 and self.q <= _ADD_TABLE_MAX:
                self._add = [[self._add_digits(a, b) for b in range(self.q)] for a in range(self.q)]
            else:
                self._add = None

    def _build_log_tables(self):
        q, p = self.q, self.p
        order_fact = factor(q - 1)
        mod_poly = list(self.modulus)
        for cand in range(2, q):
            g = _digits(cand, p, self.s)
            if all(
                poly.powmod(self._fp, poly.trim(self._fp, g), (q - 1) // r, mod_poly) != [1]
                for r in order_fact.primes
            ):
                break
        exp = [0] * (2 * (q - 1))
        log = [0] * q
        cur = [1]
        gpoly = poly.trim(self._fp, g)
        for t in range(q - 1):
            v = _undigits(cur, p)
            exp[t] = exp[t + q - 1] = v
            log[v] = t
            cur = poly.mod(self._fp, poly.mul(self._fp, cur, gpoly), mod_poly)
        self._exp, self._log = exp, log
        self.generator = cand

    def _add_digits(self, a, b, sign=1):
        p = self.p
        out, base = 0, 1
        while a or b:
            out += ((a % p + sign * (b % p)) % p) * base
            a //= p
            b //= p
            base *= p
        return out

    # arithmetic on encoded ints ------------------------------------------
    def add(self, a, b):
        if self.s == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if self._add is not None:
            return self._add[a][b]
        return self._add_digits(a, b)

    def neg(self, a):
        if self.s == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return self._add_digits(0, a, -1)

    def sub(self, a, b):
        if self.s == 1:
            return (a - b) % self.p
        if self.p == 2:
            return a ^ b
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.s == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self.s == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    @staticmethod
    def is_zero(a):
        return a == 0

    def elements(self):
        return range(self.q)

    def from_int(self, n: int) -> int:
        """Embed an integer: reduced mod p into the prime subfield."""
        return n % self.p

    @cached_property
    def _abs_trace_basis(self):
        # Tr_{F_q/F_p}(y^i) computed as the literal sum of conjugates
        out = []
        for i in range(self.s):
            yi = self.p**i
            acc, x = 0, yi
            for _ in range(self.s):
                acc = self.add(acc, x)
                x = self.pow(x, self.p)
            if acc >= self.p:
                raise AssertionError("absolute trace left the prime field")
            out.append(acc)
        return tuple(out)

    def abs_trace(self, a: int) -> int:
        """Tr_{F_q/F_p}(a) as an int in [0, p)."""
        if self.s == 1:
            return a
        t = 0
        for i, c in enumerate(_digits(a, self.p, self.s)):
            t += c * self._abs_trace_basis[i]
        return t % self.p

    def __eq__(self, other):
        return isinstance(other, BaseField) and (self.p, self.s) == (other.p, other.s)

    def __hash__(self):
        return hash((self.p, self.s))

    def __repr__(self):
        return f"BaseField(p={self.p}, s={self.s}, modulus={list(self.modulus)})"


def _digits(n: int, base: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        n, r = divmod(n, base)
        out.append(r)
    return out


def _undigits(ds, base: int) -> int:
    n = 0
    for d in reversed(ds):
        n = n * base + d
    return n


class FieldElem:
    """Element of F_{q^m}: m base-field ints, constant coefficient first."""

    __slots__ = ("field", "c", "_hash")

    def __init__(self, field: "ExtField", coeffs):
        self.field = field
        self.c = tuple(coeffs)
        self._hash = None

    # construction helpers
    def _new(self, coeffs):
        return FieldElem(self.field, coeffs)

    def __add__(self, other):
        other = self.field.coerce(other)
        B = self.field.base
        return self._new(B.add(a, b) for a, b in zip(self.c, other.c))

    __radd__ = __add__

    def __sub__(self, other):
        other = self.field.coerce(other)
        B = self.field.base
        return self._new(B.sub(a, b) for a, b in zip(self.c, other.c))

    def __rsub__(self, other):
        return self.field.coerce(other) - self

    def __neg__(self):
        B = self.field.base
        return self._new(B.neg(a) for a in self.c)

    def __mul__(self, other):
        return self.field.mul(self, self.field.coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self.field.coerce(other).inverse()

    def __rtruediv__(self, other):
        return self.field.coerce(other) * self.inverse()

    def __pow__(self, e: int):
        return self.field.pow(self, e)

    def inverse(self) -> "FieldElem":
        return self.field.inv(self)

    def frobenius(self) -> "FieldElem":
        return self ** self.field.q

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.c == other.c and self.field is other.field
        if isinstance(other, int):
            return self == self.field.coerce(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.c)
        return self._hash

    def __int__(self):
        return self.field.index(self)

    def __repr__(self):
        return f"FieldElem({list(self.c)})"


class ExtField:
    """F_{q^m} = F_q[x]/(modulus) with modulus monic irreducible of degree m."""

    def __init__(self, base: BaseField, m: int, modulus: tuple | None = None):
        if m < 1:
            raise ValueError("m must be >= 1")
        self.base, self.m = base, m
        self.p, self.s, self.q = base.p, base.s, base.q
        self.order = self.q**m
        if modulus is None:
            if m == 1:
                modulus = (0, 1)
            else:
                modulus = _first_irreducible(base, m, self.q, lambda i, n: _digits(i, self.q, n))
        elif m > 1 and not poly.is_irreducible(base, list(modulus), self.q):
            raise ValueError("modulus is not irreducible")
        self.modulus = tuple(modulus)
        self.zero = FieldElem(self, (0,) * m)
        self.one = FieldElem(self, (1,) + (0,) * (m - 1))
        self._dlog: DlogTable | None = None

    # ring interface used by poly.* -----------------------------------------
    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def inv(self, a: FieldElem) -> FieldElem:
        if a.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        if self.m == 1:
            return FieldElem(self, (self.base.inv(a.c[0]),))
        B = self.base
        g, s, _ = poly.xgcd(B, poly.trim(B, a.c), list(self.modulus))
        return self._from_poly(s)

    @staticmethod
    def is_zero(a):
        return a.is_zero()

    def mul(self, a: FieldElem, b: FieldElem) -> FieldElem:
        B = self.base
        m = self.m
        if m == 1:
            return FieldElem(self, (B.mul(a.c[0], b.c[0]),))
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(a.c):
            if x == 0:
                continue
            for j, y in enumerate(b.c):
                if y:
                    prod[i + j] = B.add(prod[i + j], B.mul(x, y))
        mod_ = self.modulus
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k]
            if c:
                for j in range(m):
                    if mod_[j]:
                        prod[k - m + j] = B.sub(prod[k - m + j], B.mul(c, mod_[j]))
        return FieldElem(self, prod[:m])

    def pow(self, a: FieldElem, e: int) -> FieldElem:
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            e >>= 1
            if e:
                a = self.mul(a, a)
        return result

    # conversions -----------------------------------------------------------
    def coerce(self, x) -> FieldElem:
        if isinstance(x, FieldElem):
            if x.field is not self:
                raise TypeError("element of a different field")
            return x
        if isinstance(x, int):
            return self.embed(self.base.from_int(x))
        raise TypeError(f"cannot coerce {x!r}")

    def embed(self, b: int) -> FieldElem:
        """Base-field int -> constant element of the extension."""
        return FieldElem(self, (b,) + (0,) * (self.m - 1))

    def gen(self) -> FieldElem:
        """The residue class of x."""
        if self.m == 1:
            return FieldElem(self, (self.base.neg(self.modulus[0]),))
        return FieldElem(self, (0, 1) + (0,) * (self.m - 2))

    def _from_poly(self, coeffs) -> FieldElem:
        coeffs = list(coeffs) + [0] * (self.m - len(coeffs))
        return FieldElem(self, coeffs[: self.m])

    def element(self, idx: int) -> FieldElem:
        """Element with index idx in [0, q^m): base-q digits are coefficients."""
        return FieldElem(self, _digits(idx, self.q, self.m))

    def index(self, a: FieldElem) -> int:
        return _undigits(a.c, self.q)

    def elements(self):
        for i in range(self.order):
            yield self.element(i)

    def nonzero_elements(self):
        for i in range(1, self.order):
            yield self.element(i)

    # trace -----------------------------------------------------------------
    def rel_trace(self, a: FieldElem) -> int:
        """Tr_{F_{q^m}/F_q}(a) as the literal sum of the m conjugates."""
        acc, x = self.zero, a
        for _ in range(self.m):
            acc = acc + x
            x = x.frobenius()
        if any(acc.c[1:]):
            raise AssertionError(f"trace {acc!r} is not in the base field")
        return acc.c[0]

    @cached_property
    def _trace_basis(self):
        return tuple(self.rel_trace(FieldElem(self, [int(i == j) for j in range(self.m)])) for i in range(self.m))

    def trace(self, a: FieldElem) -> int:
        """F_q-linear fast path of rel_trace, from the traces of 1, x, ..., x^(m-1)."""
        B = self.base
        t = 0
        for c, tb in zip(a.c, self._trace_basis):
            if c and tb:
                t = B.add(t, B.mul(c, tb))
        return t

    def abs_trace(self, a: FieldElem) -> int:
        """Tr_{F_{q^m}/F_p}(a) = Tr_{F_q/F_p}(Tr_{F_{q^m}/F_q}(a))."""
        return self.base.abs_trace(self.trace(a))

    # orders ----------------------------------------------------------------
    @cached_property
    def order_factorization(self) -> Factorization:
        return factor_qm_minus_1(self.q, self.m)

    def mult_order(self, a: FieldElem, fact: Factorization | None = None) -> int:
        if a.is_zero():
            raise ZeroElement("order of zero")
        fact = fact or self.order_factorization
        n = fact.value
        for ell, e in fact.factors:
            for _ in range(e):
                if (a ** (n // ell)) == self.one:
                    n //= ell
                else:
                    break
        return n

    def is_e_free(self, a: FieldElem, e: int | Factorization, fact: Factorization | None = None) -> bool:
        """a^((q^m-1)/l) != 1 for every prime l dividing e."""
        if a.is_zero():
            raise ZeroElement("freeness of zero")
        fact = fact or self.order_factorization
        n = fact.value
        primes = e.primes if isinstance(e, Factorization) else [l for l in fact.primes if e % l == 0]
        if isinstance(e, int) and n % e:
            raise ValueError(f"{e} does not divide {n}")
        return all(a ** (n // l) != self.one for l in primes)

    def is_primitive(self, a: FieldElem, fact: Factorization | None = None) -> bool:
        fact = fact or self.order_factorization
        return self.is_e_free(a, fact, fact)

    def order_tests(self, a: FieldElem, fact: Factorization | None = None) -> dict:
        fact = fact or self.order_factorization
        return {
            "mult_order": self.mult_order(a, fact),
            "is_primitive": self.is_primitive(a, fact),
            "is_e_free": lambda e: self.is_e_free(a, e, fact),
        }

    def dlog_table(self, cap: int = DLOG_CAP) -> "DlogTable":
        if self._dlog is None:
            self._dlog = DlogTable.build(self, cap)
        return self._dlog

    # serialization ---------------------------------------------------------
    def describe(self) -> dict:
        return {
            "p": self.p,
            "s": self.s,
            "m": self.m,
            "base_modulus": list(self.base.modulus),
            "modulus": list(self.modulus),
        }

    def to_json(self) -> str:
        return json.dumps(self.describe(), sort_keys=True)

    @classmethod
    def from_description(cls, d: dict) -> "ExtField":
        F = build_field(d["p"], d["s"], d["m"])
        if list(F.base.modulus) != list(d["base_modulus"]) or list(F.modulus) != list(d["modulus"]):
            base = BaseField(d["p"], d["s"])
            if list(base.modulus) != list(d["base_modulus"]):
                raise ValueError("non-canonical base modulus not supported")
            F = ExtField(base, d["m"], tuple(d["modulus"]))
        return F

    def __repr__(self):
        return f"ExtField(q={self.q}, m={self.m}, modulus={list(self.modulus)})"


@dataclass
class DlogTable:
    """Generator gamma of F*_{q^m} with exponent lookup by element index."""

    field: ExtField
    generator: FieldElem
    exp: list  # exp[t] = index of gamma^t, 0 <= t < 2(q^m - 1)
    log: list  # log[index] = t, log[0] = -1

    @classmethod
    def build(cls, F: ExtField, cap: int = DLOG_CAP) -> "DlogTable":
        N = F.order
        if N > cap:
            raise CapExceeded(f"q^m = {N} exceeds dlog cap {cap}")
        fact = F.order_factorization
        for idx in range(1, N):
            g = F.element(idx)
            if F.is_primitive(g, fact):
                break
        exp = [0] * (2 * (N - 1))
        log = [-1] * N
        cur = F.one
        for t in range(N - 1):
            i = F.index(cur)
            exp[t] = exp[t + N - 1] = i
            log[i] = t
            cur = F.mul(cur, g)
        if F.index(cur) != 1:
            raise AssertionError("generator order is not q^m - 1")
        return cls(F, g, exp, log)

    def dlog(self, a: FieldElem) -> int:
        if a.is_zero():
            raise ZeroElement("dlog of zero")
        return self.log[self.field.index(a)]

    def power_of_generator(self, t: int) -> FieldElem:
        return self.field.element(self.exp[t % (self.field.order - 1)])

    def mul(self, a, b):
        if a.is_zero() or b.is_zero():
            return self.field.zero
        F = self.field
        return F.element(self.exp[self.log[F.index(a)] + self.log[F.index(b)]])

    def inverse(self, a):
        F = self.field
        return F.element(self.exp[(F.order - 1 - self.log[F.index(a)]) % (F.order - 1)])

    def pow(self, a, e):
        F = self.field
        return F.element(self.exp[self.log[F.index(a)] * e % (F.order - 1)])


@lru_cache(maxsize=64)
def build_field(p: int, s: int, m: int) -> ExtField:
    """Deterministic tower F_p <= F_{p^s} <= F_{p^(s m)}."""
    return ExtField(BaseField(p, s), m)
