"""Finite-field towers F_p <= F_q <= F_{q^k}.

An element of F_{q^k} is stored as ``k`` coefficients over F_q (powers of
the root of the top modulus), each of which is ``a`` residues mod ``p``
(powers of the root of the base modulus). Flattening that nested vector
low-first gives the element's integer *code*, which fixes the enumeration
order.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Sequence

from sympy import isprime

from ..errors import BudgetExceeded, DivisionByZero, RejectEvenChar, TowerMismatch
from . import poly

DEFAULT_BUDGET = 10**7


def _fq_add(x, y, p):
    return tuple((u + v) % p for u, v in zip(x, y))


def _fq_sub(x, y, p):
    return tuple((u - v) % p for u, v in zip(x, y))


def _fq_mul(x, y, p, modulus):
    a = len(x)
    if a == 1:
        return ((x[0] * y[0]) % p,)
    prod = [0] * (2 * a - 1)
    for i, xi in enumerate(x):
        if xi:
            for j, yj in enumerate(y):
                prod[i + j] += xi * yj
    for i in range(2 * a - 2, a - 1, -1):
        c = prod[i] % p
        if c:
            for j in range(a):
                prod[i - a + j] -= c * modulus[j]
    return tuple(v % p for v in prod[:a])


class FieldTower:
    """The field F_{q^k} together with its subfield F_q = F_{p^a}."""

    def __init__(self, p: int, a: int, k: int, base_modulus: Sequence[int],
                 top_modulus: Sequence[Sequence[int]], check: bool = True):
        if p < 3 or not isprime(p):
            raise RejectEvenChar(f"characteristic must be an odd prime, got {p}")
        if len(base_modulus) != a + 1 or base_modulus[-1] != 1:
            raise ValueError("base modulus must be monic of degree a")
        if len(top_modulus) != k + 1:
            raise ValueError("top modulus must have degree k")
        self.p = p
        self.a = a
        self.k = k
        self.q = p**a
        self.degree = a * k
        self.order = p ** (a * k)
        self.base_modulus = tuple(int(c) % p for c in base_modulus)
        self.top_modulus = tuple(tuple(int(c) % p for c in coeff) for coeff in top_modulus)
        self._zq = (0,) * a
        self._oq = (1,) + (0,) * (a - 1)
        if self.top_modulus[-1] != self._oq:
            raise ValueError("top modulus must be monic")
        self._key = (p, a, k, self.base_modulus, self.top_modulus)
        self._hash = hash(self._key)
        if check:
            self._check_moduli()

    def _check_moduli(self) -> None:
        if self.a > 1:
            prime = build_tower(self.p, 1, 1)
            f = [prime.from_int(c) for c in self.base_modulus]
            if not poly.is_irreducible(f, self.p):
                raise ValueError(f"base modulus {self.base_modulus} is reducible over F_{self.p}")
        if self.k > 1:
            base = self.base
            f = [base.element([c]) for c in self.top_modulus]
            if not poly.is_irreducible(f, self.q):
                raise ValueError("top modulus is reducible over F_q")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldTower) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"FieldTower(p={self.p}, a={self.a}, k={self.k})"

    # -- structure ---------------------------------------------------------

    @property
    def base(self) -> FieldTower:
        """F_q as a tower with k = 1 and the same base modulus."""
        if self.k == 1:
            return self
        return _tower_from_moduli(self.p, self.a, 1, self.base_modulus,
                                  (self._zq, self._oq))

    def extension(self, k: int) -> FieldTower:
        """F_{q^k} over the same F_q."""
        return _extension_of(self.base, k)

    # -- element construction ---------------------------------------------

    @property
    def zero(self) -> FFElement:
        return FFElement(self, (self._zq,) * self.k)

    @property
    def one(self) -> FFElement:
        return FFElement(self, (self._oq,) + (self._zq,) * (self.k - 1))

    def from_int(self, c: int) -> FFElement:
        fq = ((c % self.p),) + (0,) * (self.a - 1)
        return FFElement(self, (fq,) + (self._zq,) * (self.k - 1))

    def element(self, coeffs) -> FFElement:
        """Build an element from an int, a length-a list (F_q), or k such lists."""
        if isinstance(coeffs, FFElement):
            return self.embed(coeffs)
        if isinstance(coeffs, int):
            return self.from_int(coeffs)
        coeffs = list(coeffs)
        if coeffs and all(isinstance(c, int) for c in coeffs):
            coeffs = [coeffs]
        rows = []
        for row in coeffs:
            if isinstance(row, int):
                row = [row]
            row = [int(c) % self.p for c in row]
            if len(row) > self.a:
                raise ValueError(f"F_q coefficient {row} longer than a={self.a}")
            rows.append(tuple(row + [0] * (self.a - len(row))))
        if len(rows) > self.k:
            raise ValueError(f"too many coefficients for k={self.k}")
        rows += [self._zq] * (self.k - len(rows))
        return FFElement(self, tuple(rows))

    def embed(self, x: FFElement) -> FFElement:
        """Embed an element of F_q (or of this tower) into this tower."""
        if x.tower == self:
            return x
        if x.tower.k == 1 and x.tower.p == self.p and x.tower.a == self.a \
                and x.tower.base_modulus == self.base_modulus:
            return FFElement(self, (x.coeffs[0],) + (self._zq,) * (self.k - 1))
        raise TowerMismatch(f"cannot embed {x.tower} into {self}")

    def from_code(self, code: int) -> FFElement:
        p, a = self.p, self.a
        rows = []
        for _ in range(self.k):
            row = []
            for _ in range(a):
                code, d = divmod(code, p)
                row.append(d)
            rows.append(tuple(row))
        return FFElement(self, tuple(rows))

    # -- enumeration ---------------------------------------------------------

    def elements(self, start: int = 0, stop: int | None = None,
                 budget: int = DEFAULT_BUDGET) -> Iterator[FFElement]:
        """Elements with codes in ``[start, stop)``, in code order."""
        if self.order > budget:
            raise BudgetExceeded(f"|F| = {self.order} exceeds enumeration budget {budget}")
        stop = self.order if stop is None else min(stop, self.order)
        for code in range(start, stop):
            yield self.from_code(code)

    def chunks(self, n: int) -> list[range]:
        """Split the code range into ``n`` contiguous nearly-equal ranges."""
        n = max(1, min(n, self.order))
        step, extra = divmod(self.order, n)
        out, lo = [], 0
        for i in range(n):
            hi = lo + step + (1 if i < extra else 0)
            out.append(range(lo, hi))
            lo = hi
        return out

    # -- traces --------------------------------------------------------------

    def absolute_trace(self, x: FFElement) -> int:
        return x.absolute_trace()


class FFElement:
    """An element of a :class:`FieldTower`. Immutable."""

    __slots__ = ("tower", "coeffs")

    def __init__(self, tower: FieldTower, coeffs: tuple):
        self.tower = tower
        self.coeffs = coeffs

    def _coerce(self, other) -> FFElement:
        if isinstance(other, FFElement):
            if other.tower is self.tower or other.tower == self.tower:
                return other
            raise TowerMismatch(f"{self.tower} vs {other.tower}")
        if isinstance(other, int):
            return self.tower.from_int(other)
        return NotImplemented

    def __repr__(self) -> str:
        t = self.tower
        if t.k == 1 and t.a == 1:
            return f"FF({self.coeffs[0][0]} mod {t.p})"
        return f"FF({[list(c) for c in self.coeffs]})"

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.tower.from_int(other)
        if not isinstance(other, FFElement):
            return NotImplemented
        return self.tower == other.tower and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.tower._hash, self.coeffs))

    def is_zero(self) -> bool:
        return not any(any(c) for c in self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    @property
    def code(self) -> int:
        p = self.tower.p
        out, mult = 0, 1
        for row in self.coeffs:
            for d in row:
                out += d * mult
                mult *= p
        return out

    def __add__(self, other) -> FFElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.tower.p
        return FFElement(self.tower, tuple(_fq_add(u, v, p) for u, v in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> FFElement:
        p = self.tower.p
        return FFElement(self.tower, tuple(tuple((-d) % p for d in row) for row in self.coeffs))

    def __sub__(self, other) -> FFElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.tower.p
        return FFElement(self.tower, tuple(_fq_sub(u, v, p) for u, v in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other) -> FFElement:
        return (-self) + other

    def __mul__(self, other) -> FFElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = self.tower
        p, bm, k = t.p, t.base_modulus, t.k
        x, y = self.coeffs, other.coeffs
        if k == 1:
            return FFElement(t, (_fq_mul(x[0], y[0], p, bm),))
        zq = t._zq
        prod = [zq] * (2 * k - 1)
        for i, xi in enumerate(x):
            if not any(xi):
                continue
            for j, yj in enumerate(y):
                if any(yj):
                    prod[i + j] = _fq_add(prod[i + j], _fq_mul(xi, yj, p, bm), p)
        top = t.top_modulus
        for i in range(2 * k - 2, k - 1, -1):
            c = prod[i]
            if any(c):
                for j in range(k):
                    prod[i - k + j] = _fq_sub(prod[i - k + j], _fq_mul(c, top[j], p, bm), p)
        return FFElement(t, tuple(prod[:k]))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> FFElement:
        if e < 0:
            return self.inverse() ** (-e)
        result = self.tower.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def inverse(self) -> FFElement:
        if self.is_zero():
            raise DivisionByZero("inverse of zero in a finite field")
        return self ** (self.tower.order - 2)

    def __truediv__(self, other) -> FFElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> FFElement:
        return self.inverse() * other

    # -- Frobenius and traces -----------------------------------------------------

    def frobenius(self) -> FFElement:
        return self ** self.tower.p

    def pth_root(self) -> FFElement:
        """The unique ``y`` with ``y**p == self``."""
        t = self.tower
        return self ** (t.p ** (t.degree - 1))

    def in_prime_field(self) -> bool:
        c = self.coeffs
        return not any(c[0][1:]) and not any(any(r) for r in c[1:])

    def in_base_field(self) -> bool:
        return not any(any(r) for r in self.coeffs[1:])

    def absolute_trace(self) -> int:
        """Tr_{F_{q^k}/F_p} as the power sum of all p-power conjugates."""
        acc = self
        cur = self
        for _ in range(self.tower.degree - 1):
            cur = cur.frobenius()
            acc = acc + cur
        assert acc.in_prime_field(), "trace left the prime field"
        return acc.coeffs[0][0]

    def trace_to_base(self) -> FFElement:
        """Tr_{F_{q^k}/F_q}, returned as an element of the k = 1 tower."""
        t = self.tower
        acc = self
        cur = self
        for _ in range(t.k - 1):
            cur = cur ** t.q
            acc = acc + cur
        assert acc.in_base_field()
        return FFElement(t.base, (acc.coeffs[0],))

    def to_base(self) -> FFElement:
        """Restrict an element lying in F_q to the k = 1 tower."""
        if not self.in_base_field():
            raise ValueError("element does not lie in F_q")
        return FFElement(self.tower.base, (self.coeffs[0],))

    def sqrt(self) -> FFElement | None:
        """The square root with the smallest code, or None if not a square."""
        if self.is_zero():
            return self
        t = self.tower
        if self ** ((t.order - 1) // 2) != t.one:
            return None
        return min((y for y in t.elements(budget=t.order) if y * y == self), key=lambda y: y.code)


def _monic_candidates(field: FieldTower, n: int) -> Iterator[list[FFElement]]:
    """Monic degree-n polynomials over ``field`` in increasing code order."""
    total = field.order ** n
    for c in range(total):
        coeffs = []
        for _ in range(n):
            c, d = divmod(c, field.order)
            coeffs.append(field.from_code(d))
        yield coeffs + [field.one]


def _smallest_irreducible(field: FieldTower, n: int) -> list[FFElement]:
    for f in _monic_candidates(field, n):
        if n > 1 and f[0].is_zero():
            continue
        if poly.is_irreducible(f, field.order):
            return f
    raise AssertionError("no irreducible polynomial found")


@lru_cache(maxsize=None)
def _tower_from_moduli(p, a, k, base_modulus, top_modulus) -> FieldTower:
    return FieldTower(p, a, k, base_modulus, top_modulus, check=False)


@lru_cache(maxsize=None)
def _extension_of(base: FieldTower, k: int) -> FieldTower:
    if k == 1:
        return base
    f = _smallest_irreducible(base, k)
    top = tuple(c.coeffs[0] for c in f)
    return _tower_from_moduli(base.p, base.a, k, base.base_modulus, top)


@lru_cache(maxsize=None)
def build_tower(p: int, a: int = 1, k: int = 1) -> FieldTower:
    """The deterministic tower F_p <= F_{p^a} <= F_{p^{ak}}.

    Both moduli are the smallest monic irreducible polynomials when
    candidates are ordered by the integer code of their non-leading
    coefficients (low degree = least significant digit).
    """
    if p < 3 or not isprime(p):
        raise RejectEvenChar(f"characteristic must be an odd prime, got {p}")
    if a < 1 or k < 1:
        raise ValueError("extension degrees must be positive")
    if a == 1:
        base_mod = (0, 1)
    else:
        prime = build_tower(p, 1, 1)
        base_mod = tuple(c.coeffs[0][0] for c in _smallest_irreducible(prime, a))
    zq, oq = (0,) * a, (1,) + (0,) * (a - 1)
    base = _tower_from_moduli(p, a, 1, base_mod, (zq, oq))
    return _extension_of(base, k)


def embedding(src: FieldTower, dst: FieldTower) -> dict:
    """A field embedding F_{p^a} -> F_{p^a'} between k = 1 towers.

    Returns a dict with the image of the base-modulus root (smallest code
    among the roots) and a ``map`` callable.
    """
    if src.k != 1 or dst.k != 1 or src.p != dst.p or dst.a % src.a:
        raise TowerMismatch(f"no embedding {src} -> {dst}")
    f = [dst.from_int(c) for c in src.base_modulus]
    root = min((x for x in dst.elements(budget=dst.order) if poly.evaluate(f, x).is_zero()),
               key=lambda x: x.code)

    def image(x: FFElement) -> FFElement:
        acc = dst.zero
        for c in reversed(x.coeffs[0]):
            acc = acc * root + c
        return acc

    return {"root": root, "map": image}
