"""Slopes below one from the Fredholm determinant against slopes from point counts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..curve import CurveModel, Place, RegularFunction
from ..errors import OracleMismatch, ValidityTooLow
from ..ff import build_tower
from ..lfun import compute_l, newton_polygon_q
from ..polygon import NewtonPolygon, truncate_below
from .operator import DEFAULT_N, FredholmResult, fredholm_for, predicted_fredholm_slopes
from .splitting import pole_orders


@dataclass
class OracleReport:
    p: int
    terms: dict
    affine_line: bool
    fredholm: FredholmResult
    lfun_polygon: NewtonPolygon
    match: bool
    match_below_two: bool
    stable: bool | None
    parameters: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        below1 = truncate_below(self.fredholm.polygon, 1)
        return {
            "fredholm_vertices": [[x, str(y)] for x, y in below1.vertices()],
            "fredholm_slopes": self.fredholm.polygon.to_json(),
            "validity_threshold": str(self.fredholm.threshold),
            "lfun_vertices": [[x, str(y)] for x, y in truncate_below(self.lfun_polygon, 1).vertices()],
            "lfun_slopes": self.lfun_polygon.to_json(),
            "match": self.match,
            "match_below_two": self.match_below_two,
            "stable": self.stable,
            "parameters": self.parameters,
        }


def lfun_side(terms: dict[int, int], p: int, affine_line: bool) -> NewtonPolygon:
    """q-adic Newton polygon of L(f, V, s) by point counting, V = A^1 or G_m over F_p."""
    F = build_tower(p)
    model = CurveModel.p1(F)
    boundary = [Place("infinite")] if affine_line else [Place("finite", F.zero), Place("infinite")]
    f = RegularFunction.laurent(F, terms)
    return newton_polygon_q(compute_l(model, boundary, f).L_V, 1)


def oracle_compare(terms: dict[int, int], p: int, affine_line: bool, N: int = DEFAULT_N,
                   n_basis: int | None = None, retries: int = 2, check_stability: bool = True,
                   strict: bool = True) -> OracleReport:
    """Compare certified Fredholm slopes with the L-function for f = sum a_j x^j over F_p."""
    terms = {int(j): int(a) % p for j, a in terms.items() if int(a) % p}
    d0, d_inf = pole_orders(terms)
    if n_basis is None:
        n_basis = 12 * math.lcm(d0 or 1, d_inf or 1)
    for attempt in range(retries + 1):
        try:
            fred = fredholm_for(terms, p, affine_line, N, n_basis)
            break
        except ValidityTooLow:
            if attempt == retries:
                raise
            N, n_basis = 2 * N, 2 * n_basis
    L_np = lfun_side(terms, p, affine_line)
    one = Fraction(1)
    match = truncate_below(fred.polygon, one) == truncate_below(L_np, one)
    top = min(Fraction(2), fred.threshold)
    predicted = predicted_fredholm_slopes(L_np, affine_line, top)
    match_two = truncate_below(fred.polygon, top) == predicted
    stable = None
    if check_stability:
        big = fredholm_for(terms, p, affine_line, 2 * N, 2 * n_basis, half_check=False)
        stable = (big.threshold >= one
                  and truncate_below(big.polygon, one) == truncate_below(fred.polygon, one))
    params = {"N": N, "n_basis": n_basis, "t_trunc": p * n_basis + n_basis,
              "basis": "n >= 1" if affine_line else ("n >= 0" if d0 == 0 else "two-sided")}
    rep = OracleReport(p, terms, affine_line, fred, L_np, match, match_two, stable, params)
    if strict and not (match and match_two and stable is not False):
        raise OracleMismatch(f"Fredholm and point-count slopes disagree: {rep.to_json()}")
    return rep
