"""Exact arithmetic in Q(zeta_p) on the power basis 1, zeta, ..., zeta^(p-2)."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .errors import BadConjugationIndex, DivisionByZero, NonIntegral

Number = int | Fraction


def _norm_num(x: Number) -> Number:
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _reduce_cyclic(vec: list) -> tuple:
    """Reduce a length-p vector modulo 1 + zeta + ... + zeta^(p-1)."""
    top = vec[-1]
    if top:
        return tuple(_norm_num(c - top) for c in vec[:-1])
    return tuple(_norm_num(c) for c in vec[:-1])


class CycRat:
    """An element sum_i c_i zeta^i of Q(zeta_p) with i < p - 1."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable[Number]):
        coeffs = tuple(_norm_num(Fraction(c) if not isinstance(c, int) else c) for c in coeffs)
        if len(coeffs) != p - 1:
            raise ValueError(f"expected {p - 1} coefficients, got {len(coeffs)}")
        self.p = p
        self.coeffs = coeffs

    @classmethod
    def from_cyclic(cls, p: int, vec: Iterable[Number]) -> CycRat:
        """From coefficients of 1, zeta, ..., zeta^(p-1) (length p)."""
        vec = list(vec)
        if len(vec) != p:
            raise ValueError("cyclic vector must have length p")
        obj = cls.__new__(cls)
        obj.p = p
        obj.coeffs = _reduce_cyclic(vec)
        return obj

    @classmethod
    def from_int(cls, p: int, n: Number) -> CycRat:
        return cls(p, [n] + [0] * (p - 2))

    @classmethod
    def zero(cls, p: int) -> CycRat:
        return cls.from_int(p, 0)

    @classmethod
    def one(cls, p: int) -> CycRat:
        return cls.from_int(p, 1)

    def _cyclic(self) -> list:
        return list(self.coeffs) + [0]

    def _coerce(self, other) -> CycRat:
        if isinstance(other, CycRat):
            if other.p != self.p:
                raise ValueError("mixed cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return CycRat.from_int(self.p, other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"CycRat(p={self.p}, {[str(c) for c in self.coeffs]})"

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other) -> CycRat:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycRat(self.p, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> CycRat:
        return CycRat(self.p, [-a for a in self.coeffs])

    def __sub__(self, other) -> CycRat:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycRat(self.p, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other) -> CycRat:
        return (-self) + other

    def __mul__(self, other) -> CycRat:
        if isinstance(other, (int, Fraction)):
            return CycRat(self.p, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        out = [0] * p
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[(i + j) % p] += a * b
        return CycRat.from_cyclic(p, out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> CycRat:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero in Q(zeta_p)")
            return CycRat(self.p, [Fraction(a) / other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, e: int) -> CycRat:
        if e < 0:
            return self.inverse() ** (-e)
        result = CycRat.one(self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- structure ---------------------------------------------------------------

    def integral(self) -> bool:
        """Membership in Z[zeta_p]."""
        return all(isinstance(c, int) for c in self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational(self) -> Number:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def conjugate(self, j: int) -> CycRat:
        """The Galois conjugate zeta -> zeta^j."""
        p = self.p
        if j % p == 0:
            raise BadConjugationIndex(f"conjugation index {j} divisible by p={p}")
        out = [0] * p
        for i, c in enumerate(self.coeffs):
            out[(i * j) % p] += c
        return CycRat.from_cyclic(p, out)

    def norm(self) -> Number:
        """N_{Q(zeta_p)/Q}, the product of all p - 1 conjugates."""
        acc = CycRat.one(self.p)
        for j in range(1, self.p):
            acc = acc * self.conjugate(j)
        return acc.rational()

    def inverse(self) -> CycRat:
        if self.is_zero():
            raise DivisionByZero("inverse of zero in Q(zeta_p)")
        acc = CycRat.one(self.p)
        for j in range(2, self.p):
            acc = acc * self.conjugate(j)
        n = (acc * self).rational()
        return acc / n

    # -- valuations --------------------------------------------------------------

    def lambda_valuation(self) -> int | float:
        """Valuation at lambda = 1 - zeta; ``math.inf`` for zero."""
        if not self.integral():
            raise NonIntegral(f"{self} is not in Z[zeta_p]")
        if self.is_zero():
            return math.inf
        p = self.p
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        e = 0
        while g % p == 0:
            g //= p
            e += 1
        beta = self if e == 0 else CycRat(self.p, [c // p**e for c in self.coeffs])
        v = e * (p - 1)
        mu = _lambda_cofactor(p)
        while sum(beta.coeffs) % p == 0:
            beta = (beta * mu) / p
            if not beta.integral():
                raise AssertionError("exact division by lambda failed")
            v += 1
        return v

    def p_adic_valuation(self) -> Fraction | float:
        v = self.lambda_valuation()
        if v == math.inf:
            return math.inf
        return Fraction(v, self.p - 1)

    # -- serialization -----------------------------------------------------------

    def to_json(self) -> list[str]:
        return [f"{Fraction(c).numerator}/{Fraction(c).denominator}" for c in self.coeffs]

    @classmethod
    def from_json(cls, p: int, data: list[str]) -> CycRat:
        return cls(p, [Fraction(s) for s in data])


def zeta_pow(p: int, j: int) -> CycRat:
    """zeta_p^j in canonical form."""
    vec = [0] * p
    vec[j % p] = 1
    return CycRat.from_cyclic(p, vec)


def lam(p: int) -> CycRat:
    """The uniformizer lambda = 1 - zeta_p."""
    return CycRat.one(p) - zeta_pow(p, 1)


@lru_cache(maxsize=None)
def _lambda_cofactor(p: int) -> CycRat:
    """prod_{j=2}^{p-1} (1 - zeta^j), so that lambda * cofactor = p."""
    acc = CycRat.one(p)
    for j in range(2, p):
        acc = acc * (CycRat.one(p) - zeta_pow(p, j))
    return acc


def from_histogram(p: int, counts: Iterable[int]) -> CycRat:
    """sum_c counts[c] * zeta^c for a length-p list of counts."""
    return CycRat.from_cyclic(p, [int(c) for c in counts])
