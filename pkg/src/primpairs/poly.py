"""Dense univariate polynomials over a field, as lists with constant term first.

Every routine takes the coefficient field ``F`` explicitly.  ``F`` must provide
``zero``, ``one``, ``add``, ``sub``, ``neg``, ``mul``, ``inv`` and ``is_zero``.
The zero polynomial is the empty list.
"""
from __future__ import annotations


def trim(F, a):
    a = list(a)
    while a and F.is_zero(a[-1]):
        a.pop()
    return a


def degree(a) -> int | float:
    return len(a) - 1 if a else float("-inf")


def add(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.add(out[i], c)
    return trim(F, out)


def sub(F, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else F.zero
        y = b[i] if i < len(b) else F.zero
        out.append(F.sub(x, y))
    return trim(F, out)


def scale(F, a, c):
    return trim(F, [F.mul(x, c) for x in a])


def mul(F, a, b):
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(F, out)


def divmod_(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    if len(a) <= db:
        return [], trim(F, a)
    inv_lead = F.inv(b[-1])
    quot = [F.zero] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if F.is_zero(c):
            continue
        c = F.mul(c, inv_lead)
        quot[i - db] = c
        for j in range(db + 1):
            a[i - db + j] = F.sub(a[i - db + j], F.mul(c, b[j]))
    return trim(F, quot), trim(F, a[:db])


def mod(F, a, b):
    return divmod_(F, a, b)[1]


def monic(F, a):
    if not a:
        return []
    inv_lead = F.inv(a[-1])
    return [F.mul(c, inv_lead) for c in a]


def gcd(F, a, b):
    """Monic gcd; gcd(0, 0) is the zero polynomial."""
    a, b = trim(F, a), trim(F, b)
    while b:
        a, b = b, mod(F, a, b)
    return monic(F, a)


def xgcd(F, a, b):
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = trim(F, a), trim(F, b)
    s0, s1 = [F.one], []
    t0, t1 = [], [F.one]
    while r1:
        qt, r = divmod_(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(F, s0, mul(F, qt, s1))
        t0, t1 = t1, sub(F, t0, mul(F, qt, t1))
    if not r0:
        return [], s0, t0
    inv_lead = F.inv(r0[-1])
    return (
        [F.mul(c, inv_lead) for c in r0],
        scale(F, s0, inv_lead),
        scale(F, t0, inv_lead),
    )


def powmod(F, a, e: int, modulus):
    result = [F.one]
    base = mod(F, a, modulus)
    while e:
        if e & 1:
            result = mod(F, mul(F, result, base), modulus)
        e >>= 1
        if e:
            base = mod(F, mul(F, base, base), modulus)
    return result


def derivative(F, a):
    out = []
    for i in range(1, len(a)):
        c = F.zero
        for _ in range(i % F.p):
            c = F.add(c, a[i])
        out.append(c)
    return trim(F, out)


def evaluate(F, a, x):
    acc = F.zero
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def is_irreducible(F, f, field_size: int) -> bool:
    """Ben-Or test: f irreducible iff gcd(f, x^(Q^i) - x) = 1 for 1 <= i <= deg/2."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [F.zero, F.one]
    h = x
    for _ in range(n // 2):
        h = powmod(F, h, field_size, f)
        if len(gcd(F, f, sub(F, h, x))) > 1:
            return False
    return True
