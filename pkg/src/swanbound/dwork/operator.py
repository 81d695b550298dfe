"""The U_p o E_f matrix, its Fredholm determinant and the certified slope comparison."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from ..errors import OracleMismatch, TruncationTooSmall, ValidityTooLow
from ..polygon import NewtonPolygon, lower_hull, truncate_below
from .padic import PadicRamified, pack, reduce_vector, slot_bits, unpack
from .splitting import PadicLaurent, pole_orders, splitting_function

DEFAULT_N = 30


@dataclass(frozen=True)
class Basis:
    """Monomials t^n for n in [-n0, n_inf] (optionally skipping n = 0) and their weights."""

    n0: int
    n_inf: int
    d0: int
    d_inf: int
    skip_zero: bool = False

    @property
    def indices(self) -> list[int]:
        return [n for n in range(-self.n0, self.n_inf + 1) if not (self.skip_zero and n == 0)]

    def weight(self, m: int) -> Fraction:
        return Fraction(m, self.d_inf) if m >= 0 else Fraction(-m, self.d0)

    def omitted_weight(self) -> Fraction:
        """Smallest weight of an index outside the truncated basis."""
        w = [Fraction(self.n_inf + 1, self.d_inf)]
        if self.d0:
            w.append(Fraction(self.n0 + 1, self.d0))
        return min(w)

    def all_weights(self) -> Iterator[Fraction]:
        """Weights of the infinite basis in nondecreasing order."""
        streams = [(Fraction(m, self.d_inf) for m in itertools.count(1 if self.skip_zero else 0))]
        if self.d0:
            streams.append(Fraction(m, self.d0) for m in itertools.count(1))
        return heapq.merge(*streams)


@dataclass
class UpMatrix:
    p: int
    N: int
    basis: Basis
    entries: list  # entries[i][j] is a length-(p-1) tuple for (m_i, n_j)

    @property
    def size(self) -> int:
        return len(self.entries)

    def entry(self, m: int, n: int) -> PadicRamified:
        idx = self.basis.indices
        return PadicRamified(self.p, 1, self.N, self.entries[idx.index(m)][idx.index(n)])


def up_matrix(E: PadicLaurent, basis: Basis) -> UpMatrix:
    """Entry (m, n) is the coefficient of t^{pm - n} in E_f."""
    p = E.p
    idx = basis.indices
    need = p * max(abs(i) for i in idx) + max(abs(i) for i in idx)
    if need > min(-E.low, E.high):
        raise TruncationTooSmall(f"splitting function known to |exponent| <= {min(-E.low, E.high)}, need {need}")
    entries = [[E.vector(p * m - n) for n in idx] for m in idx]
    return UpMatrix(p, E.N, basis, entries)


# -- characteristic series -------------------------------------------------------


class _PackedMatrix:
    """Square matrix over Z_p[pi] mod p^N with entries packed into Python ints."""

    def __init__(self, vals: np.ndarray, p: int, N: int, bits: int):
        self.vals, self.p, self.N, self.bits = vals, p, N, bits
        self.e = p - 1

    @classmethod
    def from_entries(cls, entries, p: int, N: int) -> _PackedMatrix:
        n = len(entries)
        bits = slot_bits(p, N, n * n * (p - 1))  # traces sum n^2 products
        vals = np.empty((n, n), dtype=object)
        for i, row in enumerate(entries):
            for j, v in enumerate(row):
                vals[i, j] = pack(v, bits)
        return cls(vals, p, N, bits)

    def _reduce(self, x: int) -> int:
        slots = unpack(x, self.bits, 2 * self.e)
        return pack(reduce_vector(slots, self.p, self.e, self.N), self.bits)

    def __matmul__(self, other: _PackedMatrix) -> _PackedMatrix:
        raw = self.vals.dot(other.vals)
        red = np.frompyfunc(self._reduce, 1, 1)(raw)
        return _PackedMatrix(red, self.p, self.N, self.bits)

    def trace_product(self, other: _PackedMatrix) -> PadicRamified:
        """Tr(self @ other) without forming the product."""
        total = int((self.vals * other.vals.T).sum())
        slots = unpack(total, self.bits, 2 * self.e)
        return PadicRamified(self.p, 1, self.N, reduce_vector(slots, self.p, self.e, self.N))


def char_series(M: UpMatrix, K: int) -> list[PadicRamified]:
    """c_0..c_K of det(1 - sM) from traces of powers and Newton's identities.

    k c_k = -sum_{i=1}^k Tr(M^i) c_{k-i}; dividing by k costs v_p(k) digits,
    which the returned elements record in their precision.
    """
    p, N = M.p, M.N
    K = min(K, M.size)
    if K == 0:
        return [PadicRamified.one(p, 1, N)]
    A = _PackedMatrix.from_entries(M.entries, p, N)
    h = math.ceil(K / 2)
    powers = [None, A]
    for _ in range(2, h + 1):
        powers.append(powers[-1] @ A)
    diag = sum(A.vals[r, r] for r in range(A.vals.shape[0]))
    traces = [None, PadicRamified(p, 1, N, reduce_vector(unpack(diag, A.bits, p - 1), p, p - 1, N))]
    for i in range(2, K + 1):
        a = i // 2
        traces.append(powers[a].trace_product(powers[i - a]))
    c = [PadicRamified.one(p, 1, N)]
    for k in range(1, K + 1):
        acc = PadicRamified.zero(p, 1, N)
        for i in range(1, k + 1):
            acc = acc + traces[i] * c[k - i]
        c.append((-acc).divide_int(k))
    return c


# -- certified Newton polygon ----------------------------------------------------


@dataclass
class FredholmResult:
    polygon: NewtonPolygon  # slopes below the threshold
    threshold: Fraction
    points: list  # (k, valuation or None, trusted)
    basis: Basis
    N: int

    def vertices(self) -> list:
        return [[x, str(y)] for x, y in self.polygon.vertices()]


def _prefix_sums(weights: Iterator[Fraction], count: int) -> list[Fraction]:
    out = [Fraction(0)]
    for w in itertools.islice(weights, count):
        out.append(out[-1] + w)
    return out


def certify(coeffs: Sequence[PadicRamified], basis: Basis) -> tuple[NewtonPolygon, Fraction, list]:
    """Slopes of the true Fredholm determinant below a certified threshold.

    A computed c_k differs from the true one by a truncation error of
    valuation >= W(k-1) + (smallest omitted weight) and a precision error
    of valuation >= its precision, where W(k) is the sum of the k smallest
    basis weights. Every true c_k also has valuation >= W(k).
    """
    K = len(coeffs) - 1
    w_omit = basis.omitted_weight()
    # prefix sums of the infinite weight sequence, extended on demand
    W = _prefix_sums(basis.all_weights(), 4 * K + 64)

    def wsum(k: int) -> Fraction:
        while k >= len(W):
            W.extend(_prefix_sums(basis.all_weights(), 2 * len(W))[len(W):])
        return W[k]

    def increment(k: int) -> Fraction:
        return wsum(k + 1) - wsum(k)

    trusted, lower, pts = {}, {}, []
    for k, c in enumerate(coeffs):
        v, exact = c.valuation()
        err = Fraction(c.N) if k == 0 else min(wsum(k - 1) + w_omit, Fraction(c.N))
        if exact and v < err:
            trusted[k] = v
            pts.append((k, v, True))
        else:
            lower[k] = max(wsum(k), min(v, err))
            pts.append((k, None, False))

    hull = lower_hull(list(trusted.items()))
    verts = hull.vertices()

    def bound(k: int) -> Fraction:
        if k in trusted:
            return trusted[k]
        if k in lower:
            return lower[k]
        return wsum(k)

    def line_ok(x0, y0, slope) -> bool:
        for k in range(0, K + 1):
            if k not in trusted and bound(k) < y0 + slope * (k - x0):
                return False
        k = K + 1
        while True:
            gap = wsum(k) - (y0 + slope * (k - x0))
            if gap < 0:
                return False
            if increment(k) >= slope:
                return True
            k += 1

    def tail_slope(x0, y0) -> Fraction:
        best = None
        for k in range(x0 + 1, K + 1):
            r = (bound(k) - y0) / (k - x0)
            best = r if best is None else min(best, r)
        k = K + 1
        while True:
            r = (wsum(k) - y0) / (k - x0)
            best = r if best is None else min(best, r)
            if increment(k) >= best:
                return best
            k += 1

    certified = 0
    for i in range(1, len(verts)):
        (x0, y0), (x1, y1) = verts[i - 1], verts[i]
        if not line_ok(x0, y0, (y1 - y0) / (x1 - x0)):
            break
        certified = i
    best_tau, best_i = Fraction(0), 0
    for i in range(certified + 1):
        x0, y0 = verts[i]
        tau = tail_slope(x0, y0)
        if tau > best_tau:
            best_tau, best_i = tau, i
    x_end = verts[best_i][0]
    slopes = [s for s in hull.slopes[:x_end] if s < best_tau]
    return NewtonPolygon(slopes), best_tau, pts


def weights_below(basis: Basis, bound: Fraction) -> int:
    return sum(1 for _ in itertools.takewhile(lambda w: w < bound, basis.all_weights()))


def fredholm_np(M: UpMatrix, cut=Fraction(1), K: int | None = None,
                half_check: UpMatrix | None = None) -> FredholmResult:
    """Certified Newton polygon of det(1 - sM) below its validity threshold.

    With ``half_check`` (the same operator on a smaller basis) the threshold
    is further limited to where both computations agree.
    """
    if K is None:
        K = weights_below(M.basis, Fraction(3))
    coeffs = char_series(M, K)
    poly, tau, pts = certify(coeffs, M.basis)
    if half_check is not None:
        hpoly, htau, _ = certify(char_series(half_check, K), half_check.basis)
        tau = min(tau, htau)
        a, b = truncate_below(poly, tau).slopes, truncate_below(hpoly, tau).slopes
        if a != b:
            diff = [s for s in set(a) ^ set(b)] or [tau]
            tau = min(tau, min(diff))
    poly = NewtonPolygon(s for s in poly.slopes if s < tau)
    if Fraction(cut) > tau:
        raise ValidityTooLow(f"certified threshold {tau} is below the requested cut {cut}")
    return FredholmResult(poly, tau, pts, M.basis, M.N)


# -- end-to-end oracle -----------------------------------------------------------


def basis_for(terms: dict[int, int], p: int, n_basis: int, affine_line: bool) -> Basis:
    d0, d_inf = pole_orders({j: a % p for j, a in terms.items()})
    if affine_line:
        return Basis(0, n_basis, 0, d_inf, skip_zero=True)
    if d0 == 0:
        return Basis(0, n_basis, 0, d_inf)
    return Basis(n_basis, n_basis, d0, d_inf)


def fredholm_for(terms: dict[int, int], p: int, affine_line: bool, N: int = DEFAULT_N,
                 n_basis: int | None = None, cut=Fraction(1), half_check: bool = True) -> FredholmResult:
    """Build E_f, the U_p matrix and its certified Newton polygon for f = sum a_j x^j."""
    d0, d_inf = pole_orders({j: a % p for j, a in terms.items()})
    D = math.lcm(d0 or 1, d_inf or 1)
    n_basis = 12 * D if n_basis is None else n_basis
    t_trunc = p * n_basis + n_basis
    E = splitting_function(terms, p, N, t_trunc)
    basis = basis_for(terms, p, n_basis, affine_line)
    M = up_matrix(E, basis)
    half = None
    if half_check:
        half = up_matrix(E, basis_for(terms, p, max(1, n_basis // 2), affine_line))
    return fredholm_np(M, cut, half_check=half)


def predicted_fredholm_slopes(L_slopes: NewtonPolygon, affine_line: bool, below) -> NewtonPolygon:
    """Slopes below ``below`` of prod_{i>=0} L_Gm(q^i s) (divided by 1 - s on A^1)."""
    below = Fraction(below)
    out = []
    base = list(L_slopes.slopes) + ([Fraction(0)] if affine_line else [])
    i = 0
    while i < below:
        for s in base:
            if i + s < below:
                out.append(i + s)
        i += 1
    if affine_line:
        out.remove(Fraction(0))
    return NewtonPolygon(out)
