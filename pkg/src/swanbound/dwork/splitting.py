"""Teichmuller lifts, the Artin-Hasse exponential and the splitting function E_f."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..errors import BadConductor, IntegralityFailure, NoConvergence
from .padic import PadicRamified, pack, reduce_vector, residue, slot_bits, unpack


def teichmuller(c: int, p: int, N: int, D: int = 1) -> PadicRamified:
    """The (p-1)-th root of unity (or 0) congruent to c mod p, to precision N."""
    mod = p**N
    x = c % p
    for _ in range(N + 1):
        nx = pow(x, p, mod)
        if nx == x:
            break
        x = nx
    return PadicRamified(p, D, N, [x])


@lru_cache(maxsize=None)
def _artin_hasse(p: int, M: int) -> tuple[Fraction, ...]:
    coeffs = [Fraction(1)]
    for n in range(1, M):
        acc = Fraction(0)
        pk = 1
        while pk <= n:
            acc += coeffs[n - pk]
            pk *= p
        coeffs.append(acc / n)
    return tuple(coeffs)


def artin_hasse_coeffs(p: int, M: int) -> list[Fraction]:
    """First M coefficients of exp(sum_i x^{p^i} / p^i), asserted p-integral.

    Uses n e_n = sum_{p^i <= n} e_{n - p^i}, which follows from differentiating.
    """
    coeffs = list(_artin_hasse(p, M))
    for n, c in enumerate(coeffs):
        if c.denominator % p == 0:
            raise IntegralityFailure(f"Artin-Hasse coefficient e_{n} = {c} is not p-integral")
    return coeffs


@lru_cache(maxsize=None)
def dwork_zeta(p: int, N: int) -> PadicRamified:
    """exp(pi t - pi t^p) at t = 1: a primitive p-th root of unity in Z_p[pi].

    The t^n coefficient is sum_j (-1)^j pi^{n-(p-1)j} / ((n-pj)! j!), a rational
    multiple of pi^{n mod (p-1)}; its valuation grows like n(p-1)/p^2.
    """
    e = p - 1
    nmax = math.ceil((N + 1) * p * p / (p - 1)) + p
    acc = [0] * e
    for n in range(nmax + 1):
        r = n % e
        total = Fraction(0)
        for j in range(n // p + 1):
            u = (n - e * j - r) // e
            total += Fraction((-1) ** j * (-p) ** u, math.factorial(n - p * j) * math.factorial(j))
        acc[r] += residue(total, p, N)
    zeta = PadicRamified(p, 1, N, acc)
    if zeta ** p != 1 or zeta == 1:
        raise NoConvergence("series for zeta_p did not converge to a primitive p-th root of unity")
    return zeta


def _eval_artin_hasse(x: PadicRamified, coeffs: list[Fraction], derivative: bool = False) -> PadicRamified:
    p, D, N = x.p, x.D, x.N
    cs = coeffs
    if derivative:
        cs = [c * n for n, c in enumerate(coeffs)][1:]
    acc = PadicRamified.zero(p, D, N)
    for c in reversed(cs):
        acc = acc * x + PadicRamified.from_int(p, D, N, c)
    return acc


@lru_cache(maxsize=None)
def solve_gamma(p: int, N: int) -> PadicRamified:
    """gamma in Z_p[pi] with E(gamma) = zeta_p and v_p(gamma) = 1/(p-1).

    Newton iteration on E_trunc(x) - zeta from x = pi; E is truncated where
    the terms e_l gamma^l drop below precision N.
    """
    zeta = dwork_zeta(p, N)
    coeffs = artin_hasse_coeffs(p, N * (p - 1) + 2)
    g = PadicRamified.pi(p, 1, N)
    for _ in range(4 * N.bit_length() + 8):
        F = _eval_artin_hasse(g, coeffs) - zeta
        if F.is_zero():
            break
        g = g - F * _eval_artin_hasse(g, coeffs, derivative=True).inverse()
    else:
        raise NoConvergence(f"Newton iteration for gamma stalled at p={p}, N={N}")
    v, exact = g.valuation()
    if not exact or v != Fraction(1, p - 1):
        raise NoConvergence(f"gamma has valuation {v}, expected 1/{p - 1}")
    if _eval_artin_hasse(g, coeffs) != zeta:
        raise NoConvergence("E(gamma) does not reproduce zeta_p")
    return g


def artin_hasse_at(x: PadicRamified) -> PadicRamified:
    """E(x) for v_p(x) >= 1/(p-1), truncated at precision."""
    return _eval_artin_hasse(x, artin_hasse_coeffs(x.p, x.N * (x.p - 1) + 2))


@dataclass(frozen=True)
class PadicLaurent:
    """A Laurent series over Z_p[pi] (D = 1) known for exponents low..low+len-1 modulo p^N."""

    p: int
    N: int
    low: int
    coeffs: tuple  # tuple of length-(p-1) tuples

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    def coeff(self, k: int) -> PadicRamified:
        i = k - self.low
        if not 0 <= i < len(self.coeffs):
            raise IndexError(f"exponent {k} outside the computed window [{self.low}, {self.high}]")
        return PadicRamified(self.p, 1, self.N, self.coeffs[i])

    def vector(self, k: int) -> tuple:
        return self.coeffs[k - self.low]


def _series_mul(a: list, b: list, p: int, N: int, keep: int) -> list:
    """Product of two power series with Z_p[pi] coefficients, first ``keep`` terms."""
    e = p - 1
    stride = 2 * e - 1
    bits = slot_bits(p, N, min(len(a), len(b)) * e)
    pad = [0] * (stride - e)
    A = pack([c for v in a[:keep] for c in list(v) + pad], bits)
    B = pack([c for v in b[:keep] for c in list(v) + pad], bits)
    n = min(keep, len(a) + len(b) - 1)
    slots = unpack(A * B, bits, (len(a[:keep]) + len(b[:keep])) * stride)
    return [tuple(reduce_vector(slots[k * stride:(k + 1) * stride], p, e, N)) for k in range(n)]


def _monomial_factor(y: PadicRamified, j: int, length: int, coeffs: list[Fraction]) -> list:
    """E(y t^j) as a power series in t, first ``length`` terms."""
    p, N = y.p, y.N
    e = p - 1
    out = [(0,) * e for _ in range(length)]
    power = PadicRamified.one(p, 1, N)
    for l in range(len(coeffs)):
        if j * l >= length:
            break
        term = power * PadicRamified.from_int(p, 1, N, coeffs[l])
        out[j * l] = term.coeffs
        power = power * y
    return out


def pole_orders(terms: dict[int, int]) -> tuple[int, int]:
    """(d0, d_inf) of a Laurent polynomial sum a_j t^j."""
    nz = [j for j, a in terms.items() if a]
    d_inf = max([j for j in nz if j > 0], default=0)
    d0 = -min([j for j in nz if j < 0], default=0)
    return d0, d_inf


def splitting_function(terms: dict[int, int], p: int, N: int, t_trunc: int) -> PadicLaurent:
    """E_f(t) = prod_j E(gamma [a_j] t^j) for f = sum a_j t^j over F_p, |exponent| <= t_trunc."""
    terms = {j: a % p for j, a in terms.items() if a % p}
    d0, d_inf = pole_orders(terms)
    for d in (d0, d_inf):
        if d and d % p == 0:
            raise BadConductor(f"pole order {d} is divisible by p={p}")
    e = p - 1
    gamma = solve_gamma(p, N)
    coeffs = artin_hasse_coeffs(p, N * e + 2)
    T = t_trunc + N * e * max(d0, d_inf, 1) + 1
    one = [(1,) + (0,) * (e - 1)] + [(0,) * e] * (T - 1)
    pos, neg = list(one), list(one)
    scalar = PadicRamified.one(p, 1, N)
    for j, a in sorted(terms.items()):
        y = gamma * teichmuller(a, p, N)
        if j == 0:
            scalar = scalar * artin_hasse_at(y)
        elif j > 0:
            pos = _series_mul(pos, _monomial_factor(y, j, T, coeffs), p, N, T)
        else:
            neg = _series_mul(neg, _monomial_factor(y, -j, T, coeffs), p, N, T)
    # c_k = sum_{i - j = k} pos_i neg_j: multiply pos by the reversal of neg
    rev = list(reversed(neg))
    prod = _series_mul(pos, rev, p, N, len(pos) + len(rev))
    low = -(len(neg) - 1)
    window = []
    for k in range(-t_trunc, t_trunc + 1):
        v = prod[k - low]
        window.append(tuple((PadicRamified(p, 1, N, v) * scalar).coeffs))
    series = PadicLaurent(p, N, -t_trunc, tuple(window))
    _check_growth(series, d0, d_inf)
    return series


def _check_growth(series: PadicLaurent, d0: int, d_inf: int) -> None:
    """Coefficient of t^k has v_p >= |k| / (d (p - 1)) on each side."""
    p = series.p
    for k in range(series.low, series.high + 1):
        if k == 0:
            continue
        d = d_inf if k > 0 else d0
        v, exact = series.coeff(k).valuation()
        if not exact:
            continue
        if d == 0 or v < Fraction(abs(k), d * (p - 1)):
            raise IntegralityFailure(
                f"splitting function coefficient of t^{k} has valuation {v}, below the growth bound")
