"""Curve models (P^1 and y^2 = h(x)), places, points and local expansions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import localseries as ls
from .cyc import CycRat
from .errors import (
    BudgetExceeded,
    DegenerateCharacter,
    InputError,
    NotASquare,
    PoleOnV,
    PrecisionLoss,
)
from .ff import DEFAULT_BUDGET, FFElement, FieldTower
from .ff import poly as fpoly
from .ff.table import FieldTable, field_table
from .localseries import LaurentFq

P1 = "p1"
HYPERELLIPTIC = "hyperelliptic"


@dataclass(frozen=True)
class CurveModel:
    kind: str
    field: FieldTower
    h: tuple = ()

    def __post_init__(self):
        if self.field.k != 1:
            raise InputError("curve models live over F_q (a k = 1 tower)")
        if self.kind == HYPERELLIPTIC:
            h = fpoly.trim(self.h)
            object.__setattr__(self, "h", tuple(h))
            if len(h) - 1 < 3:
                raise InputError("hyperelliptic model needs deg h >= 3")
            if not fpoly.squarefree(h):
                raise InputError("h is not squarefree; y^2 = h(x) is singular")
        elif self.kind != P1:
            raise InputError(f"unknown curve type {self.kind!r}")

    @classmethod
    def p1(cls, field: FieldTower) -> CurveModel:
        return cls(P1, field)

    @classmethod
    def hyperelliptic(cls, field: FieldTower, h: Sequence) -> CurveModel:
        return cls(HYPERELLIPTIC, field, tuple(field.element(c) for c in h))

    @property
    def deg_h(self) -> int:
        return len(self.h) - 1


def genus(model: CurveModel) -> int:
    if model.kind == P1:
        return 0
    return (model.deg_h - 1) // 2


@dataclass(frozen=True)
class Place:
    kind: str  # "finite" | "infinite"
    x: FFElement | None = None
    y: FFElement | None = None
    branch: int | None = None

    def describe(self) -> dict:
        if self.kind == "infinite":
            out = {"type": "infinite"}
            if self.branch is not None:
                out["branch"] = self.branch
            return out
        out = {"type": "finite", "x": _elt_json(self.x)}
        if self.y is not None:
            out["y"] = _elt_json(self.y)
        return out


def _elt_json(x: FFElement):
    row = list(x.coeffs[0])
    return row[0] if len(row) == 1 else row


def infinite_places(model: CurveModel) -> list[Place]:
    """F_q-rational places at infinity; raises NotASquare if they are not rational."""
    if model.kind == P1 or model.deg_h % 2 == 1:
        return [Place("infinite")]
    if model.h[-1].sqrt() is None:
        raise NotASquare("leading coefficient of h is not a square: infinite places are not F_q-rational")
    return [Place("infinite", branch=0), Place("infinite", branch=1)]


def validate_place(model: CurveModel, place: Place) -> Place:
    F = model.field
    if place.kind == "infinite":
        if model.kind == P1 or model.deg_h % 2 == 1:
            if place.branch not in (None, 0):
                raise InputError("this model has a single place at infinity")
            return Place("infinite")
        if place.branch not in (0, 1):
            raise InputError("even-degree models need branch 0 or 1 at infinity")
        infinite_places(model)
        return place
    if place.kind != "finite" or place.x is None:
        raise InputError(f"bad place {place}")
    x = F.embed(place.x)
    if model.kind == P1:
        if place.y is not None:
            raise InputError("P^1 places take no y coordinate")
        return Place("finite", x)
    if place.y is None:
        raise InputError("hyperelliptic finite places need a y coordinate")
    y = F.embed(place.y)
    if y * y != fpoly.evaluate(list(model.h), x):
        raise InputError(f"({x}, {y}) is not on y^2 = h(x)")
    return Place("finite", x, y)


@dataclass(frozen=True)
class RegularFunction:
    """u(x) + v(x) y with u, v rational in x; v = 0 on P^1."""

    u_num: tuple
    u_den: tuple
    v_num: tuple = ()
    v_den: tuple = ()

    @classmethod
    def rational(cls, field: FieldTower, num: Sequence, den: Sequence = (1,)) -> RegularFunction:
        return cls.hyperelliptic(field, num, den, (), (1,))

    @classmethod
    def laurent(cls, field: FieldTower, terms: dict[int, object]) -> RegularFunction:
        """sum c_j x^j over integer exponents j."""
        lo = min(0, min(terms, default=0))
        hi = max(0, max(terms, default=0))
        num = [0] * (hi - lo + 1)
        for e, c in terms.items():
            num[e - lo] = c
        den = [0] * (-lo) + [1]
        return cls.rational(field, [field.element(c) for c in num], [field.element(c) for c in den])

    @classmethod
    def hyperelliptic(cls, field: FieldTower, u_num, u_den, v_num=(), v_den=(1,)) -> RegularFunction:
        def norm(num, den):
            num = fpoly.trim([field.element(c) for c in num])
            den = fpoly.trim([field.element(c) for c in den])
            if not den:
                raise InputError("zero denominator")
            if not num:
                return (), (field.one,)
            g = fpoly.gcd(num, den)
            num, _ = fpoly.divmod_(num, g)
            den, _ = fpoly.divmod_(den, g)
            lc = den[-1].inverse()
            return tuple(c * lc for c in num), tuple(c * lc for c in den)

        un, ud = norm(u_num, u_den)
        vn, vd = norm(v_num, v_den)
        return cls(un, ud, vn, vd)

    def evaluate(self, x: FFElement, y: FFElement | None = None) -> FFElement:
        F = x.tower
        emb = lambda cs: [F.embed(c) for c in cs]
        ud = fpoly.evaluate(emb(self.u_den), x)
        vd = fpoly.evaluate(emb(self.v_den), x) if self.v_num else F.one
        if ud.is_zero() or vd.is_zero():
            raise PoleOnV(f"f has a pole at x = {x}")
        val = fpoly.evaluate(emb(self.u_num), x) / ud
        if self.v_num:
            val = val + fpoly.evaluate(emb(self.v_num), x) / vd * y
        return val


# -- points ----------------------------------------------------------------------


def _boundary_keys(boundary: Sequence[Place], tower: FieldTower) -> set:
    keys = set()
    for pl in boundary:
        if pl.kind == "finite":
            keys.add((tower.embed(pl.x).code, None if pl.y is None else tower.embed(pl.y).code))
    return keys


def points(model: CurveModel, boundary: Sequence[Place], k: int, chunk: range | None = None,
           budget: int = DEFAULT_BUDGET) -> Iterator[tuple]:
    """Points of V(F_{q^k}) as (x, y) pairs (y None on P^1), by x-code then y-code.

    ``chunk`` restricts to x-codes in the given range. Scalar reference path.
    """
    if not boundary:
        raise InputError("V must be affine: give at least one boundary place")
    tower = model.field.extension(k)
    keys = _boundary_keys(boundary, tower)
    rng = chunk if chunk is not None else range(tower.order)
    if tower.order > budget:
        raise BudgetExceeded(f"|F| = {tower.order} exceeds enumeration budget {budget}")
    if model.kind == P1:
        for code in rng:
            if (code, None) not in keys:
                yield tower.from_code(code), None
        return
    roots: dict[int, list[FFElement]] = {}
    for y in tower.elements(budget=budget):
        roots.setdefault((y * y).code, []).append(y)
    h = [tower.embed(c) for c in model.h]
    for code in rng:
        x = tower.from_code(code)
        for y in sorted(roots.get(fpoly.evaluate(h, x).code, []), key=lambda e: e.code):
            if (code, y.code) not in keys:
                yield x, y


def count_projective(model: CurveModel, k: int, budget: int = DEFAULT_BUDGET) -> int:
    """|X(F_{q^k})| for the smooth projective model."""
    tower = model.field.extension(k)
    if model.kind == P1:
        return tower.order + 1
    T = field_table(tower, budget)
    hx = T.poly_eval([T.code(c) for c in model.h], np.arange(tower.order))
    affine = int(np.count_nonzero(hx == 0) + 2 * np.count_nonzero(T.is_square(hx)))
    if model.deg_h % 2:
        return affine + 1
    lc = T.code(model.h[-1])
    return affine + (2 if T.is_square(np.array([lc]))[0] else 0)


def _point_arrays(model: CurveModel, boundary: Sequence[Place], T: FieldTable, chunk: range):
    """Vectorized (x, y) codes of V(F_{q^k}) restricted to an x-code range."""
    x = np.arange(chunk.start, chunk.stop, dtype=np.int64)
    keys = _boundary_keys(boundary, T.tower)
    if model.kind == P1:
        bad = np.array(sorted(c for c, _ in keys), dtype=np.int64)
        return x[~np.isin(x, bad)], None
    hx = T.poly_eval([T.code(c) for c in model.h], x)
    zero = hx == 0
    sq = T.is_square(hx)
    r = T.sqrt(hx[sq])
    X = np.concatenate([x[zero], x[sq], x[sq]])
    Y = np.concatenate([np.zeros(int(zero.sum()), dtype=np.int64), r, T.neg(r)])
    if keys:
        drop = np.zeros(X.shape, dtype=bool)
        for cx, cy in keys:
            drop |= (X == cx) & (Y == cy)
        X, Y = X[~drop], Y[~drop]
    return X, Y


def function_values(model: CurveModel, boundary: Sequence[Place], f: RegularFunction,
                    T: FieldTable, chunk: range) -> np.ndarray:
    """Codes of f at every point of V(F_{q^k}) whose x-code lies in ``chunk``."""
    X, Y = _point_arrays(model, boundary, T, chunk)
    codes = lambda cs: [T.code(c) for c in cs]
    ud = T.poly_eval(codes(f.u_den), X)
    if (ud == 0).any():
        raise PoleOnV(f"f has a pole at a point of V over F_{T.order} (boundary list incomplete)")
    val = T.mul(T.poly_eval(codes(f.u_num), X), T.inv(ud))
    if f.v_num:
        vd = T.poly_eval(codes(f.v_den), X)
        if (vd == 0).any():
            raise PoleOnV(f"f has a pole at a point of V over F_{T.order} (boundary list incomplete)")
        vv = T.mul(T.poly_eval(codes(f.v_num), X), T.inv(vd))
        val = T.add(val, T.mul(vv, Y))
    return val


def trace_histogram(model: CurveModel, boundary: Sequence[Place], f: RegularFunction, k: int,
                    chunk: range | None = None, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Counts of Tr(f(P)) = c for c in Z/p over points P of V(F_{q^k})."""
    if not boundary:
        raise InputError("V must be affine: give at least one boundary place")
    tower = model.field.extension(k)
    T = field_table(tower, budget)
    chunk = chunk if chunk is not None else range(tower.order)
    vals = function_values(model, boundary, f, T, chunk)
    return np.bincount(T.trace[vals].astype(np.int64), minlength=T.p)


# -- local expansions -----------------------------------------------------------


def local_coordinates(model: CurveModel, place: Place, prec: int):
    """(x(t), y(t)) in the uniformizer of ``place``; y is None on P^1."""
    F = model.field
    t = LaurentFq.uniformizer(F, prec)
    if model.kind == P1:
        if place.kind == "infinite":
            return LaurentFq.monomial(F.one, -1, prec), None
        return t + place.x, None
    h = list(model.h)
    if place.kind == "finite":
        x0, y0 = place.x, place.y
        if not y0.is_zero():
            x = t + x0
            return x, ls.evaluate_poly(h, x).sqrt(y0)
        # Weierstrass point: t = y and h(x0 + delta) = t^2
        shifted = _taylor_shift(h, x0)
        c1 = shifted[1]
        if c1.is_zero():
            raise InputError("h has a repeated root")
        t2 = LaurentFq.monomial(F.one, 2, prec)
        delta = LaurentFq(F, 0, [], prec)
        for _ in range(prec):
            higher = ls.evaluate_poly([F.zero, F.zero] + shifted[2:], delta)
            new = (t2 - higher) * c1.inverse()
            if new.agrees_with(delta) and new.prec == delta.prec:
                break
            delta = new
        return delta + x0, t
    if model.deg_h % 2 == 1:
        # s = x^g / y; w = 1/x solves w = s^2 H(w) with H(w) = w^{2g+1} h(1/w)
        g = genus(model)
        H = list(reversed(h))
        wprec = prec + 2 * g + 3
        s2 = LaurentFq.monomial(F.one, 2, wprec)
        w = LaurentFq(F, 0, [], wprec)
        for _ in range(wprec):
            new = s2 * ls.evaluate_poly(H, w)
            if new.agrees_with(w) and new.prec == w.prec:
                break
            w = new
        x = w.invert()
        y = (x ** g) * LaurentFq.monomial(F.one, -1)
        return x, y
    g = genus(model)
    r = model.h[-1].sqrt()
    if r is None:
        raise NotASquare("leading coefficient of h is not a square in F_q")
    if place.branch == 1:
        r = -r
    H = ls.evaluate_poly(list(reversed(h)), t)
    x = LaurentFq.monomial(F.one, -1, prec)
    y = H.sqrt(r) * LaurentFq.monomial(F.one, -(g + 1))
    return x, y


def _taylor_shift(h: list, x0: FFElement) -> list:
    """Coefficients of h(x0 + z) in z."""
    F = x0.tower
    out = []
    cur = list(h)
    while cur:
        q, r = fpoly.divmod_(cur, [-x0, F.one])
        out.append(r[0] if r else F.zero)
        cur = q
    return out + [F.zero] * (len(h) - len(out))


def local_expansion(f: RegularFunction, model: CurveModel, place: Place, prec: int) -> LaurentFq:
    if prec < 1:
        raise PrecisionLoss("local expansion precision must be at least 1")
    x, y = local_coordinates(model, place, prec)
    val = ls.evaluate_poly(list(f.u_num), x) / ls.evaluate_poly(list(f.u_den), x)
    if f.v_num:
        val = val + ls.evaluate_poly(list(f.v_num), x) / ls.evaluate_poly(list(f.v_den), x) * y
    return val


# -- boundary data ---------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryEntry:
    place: Place
    swan: int
    frobenius: CycRat | None


@dataclass(frozen=True)
class CaseSummary:
    genus: int
    entries: tuple
    p: int
    a: int

    @property
    def m(self) -> int:
        return sum(1 for e in self.entries if e.swan > 0)

    @property
    def c(self) -> int:
        return sum(1 for e in self.entries if e.swan == 0)

    @property
    def swans(self) -> tuple:
        return tuple(e.swan for e in self.entries if e.swan > 0)

    @property
    def frobenius_values(self) -> list[CycRat]:
        return [e.frobenius for e in self.entries if e.swan == 0]

    def to_json(self) -> dict:
        return {
            "g": self.genus,
            "m": self.m,
            "c": self.c,
            "d": list(self.swans),
            "boundary": [
                {"place": e.place.describe(), "swan": e.swan,
                 "frobenius": None if e.frobenius is None else e.frobenius.to_json()}
                for e in self.entries
            ],
        }


def swan_report(f: RegularFunction, model: CurveModel, place: Place, prec: int | None = None,
                retries: int = 6) -> ls.SwanReport:
    """Local expansion plus Artin-Schreier reduction, doubling precision on failure."""
    if prec is None:
        prec = 8 + 2 * max(len(f.u_num), len(f.u_den), len(f.v_num) + len(model.h))
    for _ in range(retries):
        try:
            return ls.artin_schreier_reduce(local_expansion(f, model, place, prec))
        except PrecisionLoss:
            prec *= 2
    raise PrecisionLoss(f"could not expand f at {place.describe()} to a usable precision")


def _places_over(model: CurveModel, x0: FFElement) -> list[Place] | None:
    """F_q-rational places above x = x0, or None if they are not rational."""
    if model.kind == P1:
        return [Place("finite", x0)]
    hx = fpoly.evaluate(list(model.h), x0)
    if hx.is_zero():
        return [Place("finite", x0, hx)]
    r = hx.sqrt()
    if r is None:
        return None
    return [Place("finite", x0, r), Place("finite", x0, -r)]


def _same_place(p1: Place, p2: Place) -> bool:
    if p1.kind != p2.kind:
        return False
    if p1.kind == "infinite":
        return (p1.branch or 0) == (p2.branch or 0)
    return p1.x == p2.x and p1.y == p2.y


def boundary_summary(model: CurveModel, boundary: Sequence[Place], f: RegularFunction) -> CaseSummary:
    """Swan conductors and Frobenius values at every boundary place."""
    if not boundary:
        raise InputError("V must be affine: give at least one boundary place")
    boundary = [validate_place(model, pl) for pl in boundary]
    for i, a in enumerate(boundary):
        for b in boundary[:i]:
            if _same_place(a, b):
                raise InputError(f"boundary place {a.describe()} listed twice")
    in_boundary = lambda pl: any(_same_place(pl, b) for b in boundary)

    # every pole of f must be a listed boundary place
    F = model.field
    for den in (f.u_den, f.v_den if f.v_num else ()):
        cur = list(den)
        for x0 in F.elements():
            while len(cur) > 1 and fpoly.evaluate(cur, x0).is_zero():
                cur, _ = fpoly.divmod_(cur, [-x0, F.one])
                places = _places_over(model, x0)
                if places is None:
                    raise PoleOnV(f"f has poles above x = {x0} at places that are not F_q-rational")
                for pl in places:
                    if not in_boundary(pl) and swan_report(f, model, pl).reduced.low < 0:
                        raise PoleOnV(f"f has a pole at {pl.describe()}, which is not a boundary place")
        if len(cur) > 1:
            raise PoleOnV("f has poles at places that are not F_q-rational")
    try:
        inf = infinite_places(model)
    except NotASquare:
        deg_u = len(f.u_num) - len(f.u_den)
        deg_v = len(f.v_num) - len(f.v_den) + genus(model) + 1 if f.v_num else -1
        if max(deg_u, deg_v) > 0:
            raise
        inf = []
    for pl in inf:
        if not in_boundary(pl):
            lead = local_expansion(f, model, pl, 8 + 2 * (len(f.u_num) + len(f.v_num))).valuation()
            if lead is not None and lead < 0:
                raise PoleOnV(f"f has a pole at {pl.describe()}, which is not a boundary place")

    entries = []
    for pl in boundary:
        rep = swan_report(f, model, pl)
        frob = ls.unramified_frobenius_value(rep) if rep.swan == 0 else None
        entries.append(BoundaryEntry(pl, rep.swan, frob))
    summary = CaseSummary(genus(model), tuple(entries), F.p, F.a)
    if summary.m == 0:
        raise DegenerateCharacter(
            "the character is unramified at every boundary place (f is of the form x^p - x + const)")
    return summary
