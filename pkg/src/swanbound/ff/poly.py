"""Dense univariate polynomials over a finite field.

A polynomial is a list of :class:`FFElement` coefficients, lowest degree
first, with no trailing zeros. The zero polynomial is ``[]``.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

from sympy import factorint

if TYPE_CHECKING:
    from .tower import FFElement, FieldTower

Poly = list


def trim(f: Sequence[FFElement]) -> Poly:
    f = list(f)
    while f and f[-1].is_zero():
        f.pop()
    return f


def degree(f: Sequence[FFElement]) -> int:
    return len(f) - 1 if f else -1


def add(f, g) -> Poly:
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, c in enumerate(g):
        out[i] = out[i] + c
    return trim(out)


def neg(f) -> Poly:
    return [-c for c in f]


def sub(f, g) -> Poly:
    return add(f, neg(g))


def scale(f, c) -> Poly:
    return trim([c * x for x in f])


def mul(f, g) -> Poly:
    if not f or not g:
        return []
    zero = f[0].tower.zero
    out = [zero] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x.is_zero():
            continue
        for j, y in enumerate(g):
            out[i + j] = out[i + j] + x * y
    return trim(out)


def divmod_(f, g) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    dg = len(g) - 1
    if len(f) <= dg:
        return [], trim(f)
    lead_inv = g[-1].inverse()
    zero = g[0].tower.zero
    quo = [zero] * (len(f) - dg)
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i] * lead_inv
        if c.is_zero():
            continue
        quo[i - dg] = c
        for j, gj in enumerate(g):
            f[i - dg + j] = f[i - dg + j] - c * gj
    return trim(quo), trim(f[:dg])


def mod(f, g) -> Poly:
    return divmod_(f, g)[1]


def monic(f) -> Poly:
    if not f:
        return []
    inv = f[-1].inverse()
    return [c * inv for c in f]


def gcd(f, g) -> Poly:
    f, g = trim(f), trim(g)
    while g:
        f, g = g, mod(f, g)
    return monic(f)


def deriv(f) -> Poly:
    return trim([c * i for i, c in enumerate(f)][1:])


def evaluate(f, x):
    acc = x.tower.zero
    for c in reversed(f):
        acc = acc * x + c
    return acc


def powmod(f, e: int, m) -> Poly:
    result = [m[0].tower.one]
    base = mod(f, m)
    while e:
        if e & 1:
            result = mod(mul(result, base), m)
        e >>= 1
        if e:
            base = mod(mul(base, base), m)
    return result


def is_irreducible(f, field_order: int) -> bool:
    """Rabin's deterministic irreducibility test over a field of the given order."""
    n = degree(f)
    if n < 1:
        return False
    if n == 1:
        return True
    tower = f[0].tower
    x = [tower.zero, tower.one]
    frob = [x]
    cur = x
    for _ in range(n):
        cur = powmod(cur, field_order, f)
        frob.append(cur)
    if sub(frob[n], x):
        return False
    for ell in factorint(n):
        h = sub(frob[n // ell], x)
        if degree(gcd(h, f)) > 0:
            return False
    return True


def roots(f, field: FieldTower) -> list[FFElement]:
    """All roots of ``f`` in ``field`` by exhaustive evaluation, in code order."""
    return [x for x in field.elements() if evaluate(f, x).is_zero()]


def squarefree(f) -> bool:
    return degree(gcd(f, deriv(f))) == 0
