"""Newton polygons as finite multisets of nonnegative rational slopes."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BadThreshold, NonIntegralScaling, UnnormalizedConstant


class NewtonPolygon:
    """A convex polygon starting at the origin, stored by its sorted slopes."""

    __slots__ = ("slopes",)

    def __init__(self, slopes: Iterable = ()):
        s = tuple(sorted(Fraction(x) for x in slopes))
        if s and s[0] < 0:
            raise ValueError(f"negative slope {s[0]}")
        self.slopes = s

    def __repr__(self) -> str:
        return "NewtonPolygon({" + ", ".join(str(s) for s in self.slopes) + "})"

    def __eq__(self, other) -> bool:
        return isinstance(other, NewtonPolygon) and self.slopes == other.slopes

    def __hash__(self) -> int:
        return hash(self.slopes)

    def __len__(self) -> int:
        return len(self.slopes)

    def multiplicities(self) -> list[tuple[Fraction, int]]:
        return sorted(Counter(self.slopes).items())

    def count(self, slope) -> int:
        return self.slopes.count(Fraction(slope))

    def points(self) -> list[tuple[int, Fraction]]:
        """(n, sum of the first n slopes) for n = 0..len."""
        out = [(0, Fraction(0))]
        acc = Fraction(0)
        for i, s in enumerate(self.slopes, 1):
            acc += s
            out.append((i, acc))
        return out

    def vertices(self) -> list[tuple[int, Fraction]]:
        """Break points, including both endpoints."""
        pts = self.points()
        if len(pts) <= 2:
            return pts
        out = [pts[0]]
        for i in range(1, len(pts) - 1):
            if self.slopes[i - 1] != self.slopes[i]:
                out.append(pts[i])
        out.append(pts[-1])
        return out

    def height(self) -> Fraction:
        return sum(self.slopes, Fraction(0))

    def value_at(self, x: int) -> Fraction:
        return sum(self.slopes[:x], Fraction(0))

    # -- serialization -----------------------------------------------------------

    def to_json(self) -> list[list[int]]:
        return [[s.numerator, s.denominator, m] for s, m in self.multiplicities()]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int]]) -> NewtonPolygon:
        slopes = []
        for num, den, mult in data:
            if mult < 0 or den <= 0:
                raise ValueError(f"bad slope entry {[num, den, mult]}")
            slopes += [Fraction(num, den)] * mult
        return cls(slopes)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y_num", "y_den"])
        for x, y in self.vertices():
            w.writerow([x, y.numerator, y.denominator])
        return buf.getvalue()

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: Iterable[tuple[int, object]]) -> NewtonPolygon:
    """Lower convex hull of (index, valuation) points.

    Valuations may be ``None`` or ``math.inf`` for zero coefficients; such
    points never support the hull, and trailing ones shorten it.
    """
    pts = []
    for idx, val in sorted(points, key=lambda t: t[0]):
        if val is None or val == math.inf:
            continue
        pts.append((int(idx), Fraction(val)))
    if not pts or pts[0][0] != 0:
        raise UnnormalizedConstant("the constant coefficient must be present with valuation 0")
    if pts[0][1] != 0:
        raise UnnormalizedConstant(f"constant coefficient has valuation {pts[0][1]}, expected 0")
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slopes += [Fraction(y2 - y1) / (x2 - x1)] * (x2 - x1)
    return NewtonPolygon(slopes)


def concat(*polys: NewtonPolygon) -> NewtonPolygon:
    """Disjoint union of slope multisets."""
    out: list[Fraction] = []
    for P in polys:
        out += P.slopes
    return NewtonPolygon(out)


def truncate_below(P: NewtonPolygon, r) -> NewtonPolygon:
    r = Fraction(r)
    if r <= 0:
        raise BadThreshold(f"truncation threshold must be positive, got {r}")
    return NewtonPolygon(s for s in P.slopes if s < r)


def scale(P: NewtonPolygon, c) -> NewtonPolygon:
    """The homothety (x, y) -> (cx, cy); slopes stay, multiplicities scale by c."""
    c = Fraction(c)
    if c <= 0:
        raise NonIntegralScaling(f"scaling factor must be positive, got {c}")
    out = []
    for s, m in P.multiplicities():
        if (m * c).denominator != 1:
            raise NonIntegralScaling(f"slope {s} has multiplicity {m}, not divisible by {c.denominator}")
        out += [s] * int(m * c)
    return NewtonPolygon(out)


def rescale_q_to_p(P: NewtonPolygon, a) -> NewtonPolygon:
    """(x, y) -> (x, a y): converts q-adic slopes to p-adic ones when q = p^a."""
    a = Fraction(a)
    return NewtonPolygon(s * a for s in P.slopes)


def rescale_variable(P: NewtonPolygon, a) -> NewtonPolygon:
    """(x, y) -> (a x, y): the polygon of Q(s^a) from that of Q(s).

    ``a`` may be a fraction 1/b to undo a previous dilation; multiplicities
    must then be divisible by b.
    """
    a = Fraction(a)
    if a <= 0:
        raise NonIntegralScaling(f"dilation factor must be positive, got {a}")
    out = []
    for s, m in P.multiplicities():
        if (m * a).denominator != 1:
            raise NonIntegralScaling(f"slope {s} has multiplicity {m}, not divisible by {a.denominator}")
        out += [s / a] * int(m * a)
    return NewtonPolygon(out)


def lies_above(P1: NewtonPolygon, P2: NewtonPolygon) -> bool:
    """P1 >= P2 pointwise on their common domain."""
    n = min(len(P1), len(P2))
    y1 = y2 = Fraction(0)
    for i in range(n):
        y1 += P1.slopes[i]
        y2 += P2.slopes[i]
        if y1 < y2:
            return False
    return True


def vertices_in_lattice(P: NewtonPolygon, denominator: int) -> bool:
    """Whether every break point height lies in (1/denominator) Z."""
    return all((y * denominator).denominator == 1 for _, y in P.vertices())
