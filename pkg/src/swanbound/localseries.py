"""Precision-tracked Laurent series over F_q and Artin-Schreier reduction.

A series stores its coefficients for exponents ``low .. low+len-1``; every
coefficient with exponent in ``[low+len, prec)`` is known to be zero and
nothing is known at or beyond ``prec``. ``prec`` may be ``math.inf`` for
exact Laurent polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .cyc import CycRat, zeta_pow
from .errors import NotASquare, PrecisionLoss, RamifiedPlace
from .ff import FFElement, FieldTower


class LaurentFq:
    __slots__ = ("field", "low", "coeffs", "prec")

    def __init__(self, field: FieldTower, low: int, coeffs: Sequence[FFElement], prec=math.inf):
        coeffs = list(coeffs)
        if prec != math.inf and low + len(coeffs) > prec:
            coeffs = coeffs[: max(0, prec - low)]
        while coeffs and coeffs[0].is_zero():
            coeffs.pop(0)
            low += 1
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        if not coeffs:
            if prec == math.inf:
                low = 0
            else:
                low = prec
        self.field = field
        self.low = low
        self.coeffs = tuple(coeffs)
        self.prec = prec

    # -- constructors ------------------------------------------------------------

    @classmethod
    def constant(cls, c: FFElement, prec=math.inf) -> LaurentFq:
        return cls(c.tower, 0, [c], prec)

    @classmethod
    def monomial(cls, c: FFElement, e: int, prec=math.inf) -> LaurentFq:
        return cls(c.tower, e, [c], prec)

    @classmethod
    def uniformizer(cls, field: FieldTower, prec=math.inf) -> LaurentFq:
        return cls(field, 1, [field.one], prec)

    @classmethod
    def from_dict(cls, field: FieldTower, terms: dict[int, FFElement], prec=math.inf) -> LaurentFq:
        if not terms:
            return cls(field, 0, [], prec)
        lo, hi = min(terms), max(terms)
        return cls(field, lo, [terms.get(e, field.zero) for e in range(lo, hi + 1)], prec)

    # -- inspection --------------------------------------------------------------

    def __repr__(self) -> str:
        terms = [f"{c}*t^{self.low + i}" for i, c in enumerate(self.coeffs) if not c.is_zero()]
        return f"LaurentFq({' + '.join(terms) or '0'} + O(t^{self.prec}))"

    def is_known_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int | None:
        """Exponent of the leading nonzero term, or None if none is known."""
        return self.low if self.coeffs else None

    def _vbound(self):
        return self.low if self.coeffs else self.prec

    def coeff(self, e: int) -> FFElement:
        if e >= self.prec:
            raise PrecisionLoss(f"coefficient of t^{e} unknown (precision {self.prec})")
        i = e - self.low
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    def terms(self) -> dict[int, FFElement]:
        return {self.low + i: c for i, c in enumerate(self.coeffs) if not c.is_zero()}

    def agrees_with(self, other: LaurentFq) -> bool:
        """Equality on the common window of known coefficients."""
        prec = min(self.prec, other.prec)
        lo = min(self._vbound(), other._vbound())
        if prec == math.inf:
            return self.terms() == other.terms()
        return all(self.coeff(e) == other.coeff(e) for e in range(lo, prec))

    # -- arithmetic --------------------------------------------------------------

    def _lift(self, other) -> LaurentFq:
        if isinstance(other, LaurentFq):
            return other
        if isinstance(other, FFElement):
            return LaurentFq.constant(other)
        if isinstance(other, int):
            return LaurentFq.constant(self.field.from_int(other))
        return NotImplemented

    def __add__(self, other) -> LaurentFq:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        terms: dict[int, FFElement] = {}
        for s in (self, other):
            for e, c in s.terms().items():
                if e < prec:
                    terms[e] = terms[e] + c if e in terms else c
        return LaurentFq.from_dict(self.field, terms, prec)

    __radd__ = __add__

    def __neg__(self) -> LaurentFq:
        return LaurentFq(self.field, self.low, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other) -> LaurentFq:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> LaurentFq:
        return (-self) + other

    def __mul__(self, other) -> LaurentFq:
        if isinstance(other, (FFElement, int)) and not isinstance(other, bool):
            c = other if isinstance(other, FFElement) else self.field.from_int(other)
            return LaurentFq(self.field, self.low, [x * c for x in self.coeffs], self.prec)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec + other._vbound(), other.prec + self._vbound())
        if not self.coeffs or not other.coeffs:
            return LaurentFq(self.field, 0, [], prec)
        low = self.low + other.low
        n = len(self.coeffs) + len(other.coeffs) - 1
        if prec != math.inf:
            n = min(n, prec - low)
        if n <= 0:
            return LaurentFq(self.field, 0, [], prec)
        zero = self.field.zero
        out = [zero] * n
        for i, x in enumerate(self.coeffs):
            if i >= n:
                break
            if x.is_zero():
                continue
            for j, y in enumerate(other.coeffs[: n - i]):
                out[i + j] = out[i + j] + x * y
        return LaurentFq(self.field, low, out, prec)

    __rmul__ = __mul__

    def invert(self, prec=None) -> LaurentFq:
        """Multiplicative inverse; the window length is preserved.

        Exact non-monomial series need an explicit target ``prec``.
        """
        if not self.coeffs:
            raise PrecisionLoss("cannot invert a series with no known nonzero coefficient")
        v = self.low
        if self.prec == math.inf:
            if len(self.coeffs) == 1:
                return LaurentFq(self.field, -v, [self.coeffs[0].inverse()])
            if prec is None:
                raise PrecisionLoss("inverse of an exact non-monomial series needs a target precision")
            rel = prec + v
        else:
            rel = self.prec - v
            if prec is not None:
                rel = min(rel, prec + v)
        if rel <= 0:
            raise PrecisionLoss("empty window after inversion")
        u = [self.coeff(v + i) if v + i < self.prec else self.field.zero for i in range(rel)]
        b0 = u[0].inverse()
        b = [b0]
        for n in range(1, rel):
            acc = self.field.zero
            for i in range(1, n + 1):
                if not u[i].is_zero():
                    acc = acc + u[i] * b[n - i]
            b.append(-b0 * acc)
        return LaurentFq(self.field, -v, b, rel - v)

    def __truediv__(self, other) -> LaurentFq:
        if isinstance(other, FFElement):
            return self * other.inverse()
        other = self._lift(other)
        prec = None
        if other.prec == math.inf and len(other.coeffs) > 1:
            if self.prec == math.inf:
                raise PrecisionLoss("exact division needs a finite precision")
            prec = self.prec - self._vbound() - other.low
        return self * other.invert(prec)

    def __pow__(self, e: int) -> LaurentFq:
        if e < 0:
            return self.invert() ** (-e)
        result = LaurentFq.constant(self.field.one)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def sqrt(self, leading_root: FFElement | None = None) -> LaurentFq:
        """Square root whose leading coefficient is ``leading_root``.

        Without a supplied root the canonical (smallest-code) one is used.
        """
        if not self.coeffs:
            raise PrecisionLoss("cannot take the square root of an unknown series")
        v = self.low
        if v % 2:
            raise NotASquare(f"odd valuation {v}")
        c = self.coeffs[0]
        if leading_root is None:
            leading_root = c.sqrt()
            if leading_root is None:
                raise NotASquare(f"leading coefficient {c} is not a square in F_q")
        if leading_root * leading_root != c:
            raise NotASquare(f"{leading_root} is not a square root of {c}")
        rel = self.prec - v
        if rel == math.inf:
            raise PrecisionLoss("square root of an exact series needs a finite precision")
        u = [self.coeff(v + i) for i in range(rel)]
        inv2s0 = (leading_root * 2).inverse()
        s = [leading_root]
        for n in range(1, rel):
            acc = u[n]
            for i in range(1, n):
                acc = acc - s[i] * s[n - i]
            s.append(acc * inv2s0)
        return LaurentFq(self.field, v // 2, s, v // 2 + rel)

    def truncate(self, prec: int) -> LaurentFq:
        return LaurentFq(self.field, self.low, self.coeffs, min(self.prec, prec))


def evaluate_poly(coeffs: Sequence[FFElement], x: LaurentFq) -> LaurentFq:
    """Horner evaluation of a polynomial with F_q coefficients at a series."""
    acc = LaurentFq(x.field, 0, [])
    for c in reversed(list(coeffs)):
        acc = acc * x + LaurentFq.constant(c)
    return acc


@dataclass(frozen=True)
class SwanReport:
    swan: int
    reduced: LaurentFq
    constant_term: FFElement | None


def artin_schreier_reduce(g: LaurentFq) -> SwanReport:
    """Normalize y^p - y = g to a pole of order prime to p (or no pole)."""
    field = g.field
    p = field.p
    while True:
        lead = g.valuation()
        if lead is None or lead >= 0:
            if g.prec <= 0:
                raise PrecisionLoss(f"series known only below t^{g.prec}; pole order undetermined")
            return SwanReport(0, g, g.coeff(0))
        d = -lead
        if d % p:
            return SwanReport(d, g, None)
        a = g.coeffs[0]
        h = a.pth_root()
        # g - (h^p - h) with h = a^{1/p} t^{-d/p}
        g = g + LaurentFq.monomial(-a, -d) + LaurentFq.monomial(h, -d // p)


def swan_conductor(g: LaurentFq) -> int:
    return artin_schreier_reduce(g).swan


def unramified_frobenius_value(report: SwanReport) -> CycRat:
    """zeta_p^{Tr(constant term)} at an F_q-rational unramified place."""
    if report.swan:
        raise RamifiedPlace(f"place is ramified with Swan conductor {report.swan}")
    c = report.constant_term
    return zeta_pow(c.tower.p, c.to_base().absolute_trace())
