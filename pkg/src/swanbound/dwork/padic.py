"""Truncated arithmetic in Z_p[pi_D] with pi_D^{D(p-1)} = -p.

Elements are vectors of e = D(p-1) residues modulo p^N in the basis
1, pi_D, ..., pi_D^{e-1}. Since this basis is a Z_p-basis of the ring,
an element is divisible by p^v exactly when every coordinate is.

Series and matrix products go through Kronecker substitution: a vector of
residues is packed into one Python integer with fixed-width slots, so a
polynomial product becomes a single big-integer product.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from ..errors import DivisionByZero, NonIntegral


def vp_int(x: int, p: int, cap: int) -> int:
    """v_p of an integer, capped at ``cap`` (used for zero residues)."""
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


def residue(x, p: int, N: int) -> int:
    """A p-integral rational reduced modulo p^N."""
    mod = p**N
    if isinstance(x, int):
        return x % mod
    x = Fraction(x)
    if x.denominator % p == 0:
        raise NonIntegral(f"{x} is not p-integral")
    return x.numerator * pow(x.denominator, -1, mod) % mod


class PadicRamified:
    """An element of Z_p[pi_D] known modulo p^N."""

    __slots__ = ("p", "D", "N", "coeffs")

    def __init__(self, p: int, D: int, N: int, coeffs: Sequence[int]):
        e = D * (p - 1)
        mod = p**N
        cs = [int(c) % mod for c in coeffs]
        # reduce pi_D^{e+i} = -p pi_D^i
        while len(cs) > e:
            top = cs.pop()
            i = len(cs) - e
            cs[i] = (cs[i] - p * top) % mod
        cs += [0] * (e - len(cs))
        self.p, self.D, self.N = p, D, N
        self.coeffs = tuple(cs)

    @property
    def e(self) -> int:
        return self.D * (self.p - 1)

    @classmethod
    def from_int(cls, p: int, D: int, N: int, x) -> PadicRamified:
        return cls(p, D, N, [residue(x, p, N)])

    @classmethod
    def zero(cls, p: int, D: int, N: int) -> PadicRamified:
        return cls(p, D, N, [])

    @classmethod
    def one(cls, p: int, D: int, N: int) -> PadicRamified:
        return cls(p, D, N, [1])

    @classmethod
    def uniformizer(cls, p: int, D: int, N: int) -> PadicRamified:
        """pi_D."""
        return cls(p, D, N, [0, 1])

    @classmethod
    def pi(cls, p: int, D: int, N: int) -> PadicRamified:
        """pi = pi_D^D, a root of X^{p-1} = -p."""
        return cls(p, D, N, [0] * D + [1])

    def __repr__(self) -> str:
        return f"PadicRamified(p={self.p}, D={self.D}, N={self.N}, {list(self.coeffs)})"

    def _check(self, other) -> PadicRamified:
        if isinstance(other, int):
            return PadicRamified.from_int(self.p, self.D, self.N, other)
        if (other.p, other.D) != (self.p, self.D):
            raise ValueError("mixed p-adic rings")
        return other

    def _nmin(self, other) -> int:
        return min(self.N, other.N)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = PadicRamified.from_int(self.p, self.D, self.N, other)
        if not isinstance(other, PadicRamified):
            return NotImplemented
        mod = self.p ** min(self.N, other.N)
        return all((a - b) % mod == 0 for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self) -> int:
        return hash((self.p, self.D, self.N, self.coeffs))

    def __add__(self, other) -> PadicRamified:
        other = self._check(other)
        return PadicRamified(self.p, self.D, self._nmin(other),
                             [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> PadicRamified:
        return PadicRamified(self.p, self.D, self.N, [-a for a in self.coeffs])

    def __sub__(self, other) -> PadicRamified:
        other = self._check(other)
        return PadicRamified(self.p, self.D, self._nmin(other),
                             [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other) -> PadicRamified:
        return (-self) + other

    def __mul__(self, other) -> PadicRamified:
        other = self._check(other)
        out = [0] * (2 * self.e - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PadicRamified(self.p, self.D, self._nmin(other), out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> PadicRamified:
        if n < 0:
            return self.inverse() ** (-n)
        result = PadicRamified.one(self.p, self.D, self.N)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> tuple[Fraction, bool]:
        """(v_p, exact). When not exact the element is only known to have v_p >= N."""
        best = None
        for i, c in enumerate(self.coeffs):
            if c:
                v = Fraction(vp_int(c, self.p, self.N)) + Fraction(i, self.e)
                best = v if best is None else min(best, v)
        if best is None or best >= self.N:
            return Fraction(self.N), False
        return best, True

    def is_unit(self) -> bool:
        return self.coeffs[0] % self.p != 0

    def inverse(self) -> PadicRamified:
        """Inverse of a unit by Newton iteration x <- x (2 - u x)."""
        if not self.is_unit():
            raise DivisionByZero(f"{self} is not a unit")
        p, N = self.p, self.N
        x = PadicRamified(p, self.D, N, [pow(self.coeffs[0], -1, p**N)])
        two = PadicRamified.from_int(p, self.D, N, 2)
        for _ in range(2 * (N * self.e).bit_length() + 2):
            nx = x * (two - self * x)
            if nx == x:
                break
            x = nx
        return x

    def divide_int(self, k: int) -> PadicRamified:
        """Exact division by a nonzero integer; the precision drops by v_p(k)."""
        p = self.p
        v = vp_int(k, p, 10**9)
        u = k // p**v
        if any(c % p**v for c in self.coeffs):
            raise NonIntegral(f"{self} is not divisible by {k}")
        N = self.N - v
        mod = p**N
        inv = pow(u, -1, mod)
        return PadicRamified(p, self.D, N, [(c // p**v) * inv for c in self.coeffs])

    def with_precision(self, N: int) -> PadicRamified:
        return PadicRamified(self.p, self.D, min(N, self.N), self.coeffs)


# -- Kronecker packing ---------------------------------------------------------


def slot_bits(p: int, N: int, terms: int) -> int:
    """Slot width (a multiple of 8) holding a sum of ``terms`` products of residues."""
    bits = 2 * N * math.log2(p) + math.log2(max(terms, 1)) + 2
    return 8 * math.ceil(bits / 8)


def pack(vals: Sequence[int], bits: int) -> int:
    nbytes = bits // 8
    return int.from_bytes(b"".join(int(v).to_bytes(nbytes, "little") for v in vals), "little")


def unpack(x: int, bits: int, count: int) -> list[int]:
    nbytes = bits // 8
    raw = x.to_bytes(nbytes * count, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") for i in range(count)]


def reduce_vector(vals: Sequence[int], p: int, e: int, N: int) -> list[int]:
    """Fold pi_D^{e+i} = -p pi_D^i and reduce modulo p^N."""
    mod = p**N
    cs = list(vals)
    for i in range(len(cs) - 1, e - 1, -1):
        cs[i - e] -= p * cs[i]
    return [c % mod for c in cs[:e]]
