from __future__ import annotations

import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from swanbound.cyc import CycRat, from_histogram, lam, zeta_pow
from swanbound.errors import BadConjugationIndex, DivisionByZero, NonIntegral

PRIMES = [3, 5, 7]


def sympy_norm(alpha: CycRat) -> int:
    """Norm as the resultant of Phi_p and the representing polynomial."""
    x = sympy.Symbol("x")
    poly = sum(int(c) * x**i for i, c in enumerate(alpha.coeffs))
    return int(sympy.resultant(sympy.cyclotomic_poly(alpha.p, x), poly, x))


def vp(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@st.composite
def cyc_integers(draw, p=None, lo=-6, hi=6):
    p = draw(st.sampled_from(PRIMES)) if p is None else p
    coeffs = draw(st.lists(st.integers(lo, hi), min_size=p - 1, max_size=p - 1))
    return CycRat(p, coeffs)


class TestRootsOfUnity:
    @pytest.mark.parametrize("p", PRIMES)
    def test_zeta_zero_power(self, p):
        assert zeta_pow(p, 0) == 1

    @pytest.mark.parametrize("p", PRIMES)
    def test_top_power_via_minimal_polynomial(self, p):
        assert zeta_pow(p, p - 1) == -sum((zeta_pow(p, j) for j in range(p - 1)), CycRat.zero(p))

    @pytest.mark.parametrize("p", PRIMES)
    def test_roots_sum_to_zero(self, p):
        assert sum((zeta_pow(p, j) for j in range(p)), CycRat.zero(p)).is_zero()

    @pytest.mark.parametrize("p", PRIMES)
    def test_zeta_has_order_p(self, p):
        z = zeta_pow(p, 1)
        assert z**p == 1
        assert all(z**j != 1 for j in range(1, p))


class TestValuation:
    @pytest.mark.parametrize("p", PRIMES)
    def test_examples(self, p):
        assert CycRat.zero(p).lambda_valuation() == math.inf
        assert lam(p).lambda_valuation() == 1
        assert CycRat.from_int(p, p).lambda_valuation() == p - 1
        assert CycRat.from_int(p, p).p_adic_valuation() == 1
        assert lam(p).p_adic_valuation() == Fraction(1, p - 1)

    @pytest.mark.parametrize("p", PRIMES)
    def test_repeated_division_by_lambda(self, p):
        # p divided by lambda exactly p - 1 times stays integral, one more time does not
        x = CycRat.from_int(p, p)
        for _ in range(p - 1):
            x = x / lam(p)
            assert x.integral()
        assert not (x / lam(p)).integral()

    def test_gauss_sum_valuation(self):
        p = 5
        counts = [0] * p
        for x in range(p):
            counts[x * x % p] += 1
        g = from_histogram(p, counts)
        assert g.p_adic_valuation() == Fraction(1, 2)
        assert g * g == p  # p = 1 mod 4

    def test_non_integral_rejected(self):
        with pytest.raises(NonIntegral):
            CycRat(3, [Fraction(1, 2), 0]).lambda_valuation()

    @given(cyc_integers())
    @settings(max_examples=200)
    def test_valuation_matches_norm(self, a):
        # lambda is totally ramified of residue degree 1: v_lambda = v_p(N)
        if a.is_zero():
            return
        n = sympy_norm(a)
        assert n == a.norm()
        assert a.lambda_valuation() == vp(n, a.p)

    @given(st.data())
    @settings(max_examples=500)
    def test_valuation_multiplicative(self, data):
        p = data.draw(st.sampled_from(PRIMES))
        a = data.draw(cyc_integers(p))
        b = data.draw(cyc_integers(p))
        if a.is_zero() or b.is_zero():
            assert (a * b).lambda_valuation() == math.inf
            return
        assert (a * b).lambda_valuation() == a.lambda_valuation() + b.lambda_valuation()


class TestConjugationAndNorm:
    @given(cyc_integers())
    def test_identity_conjugation(self, a):
        assert a.conjugate(1) == a

    @pytest.mark.parametrize("p", PRIMES)
    def test_inverse_conjugation(self, p):
        assert zeta_pow(p, 1).conjugate(p - 1) == zeta_pow(p, 1).inverse()

    @pytest.mark.parametrize("p", PRIMES)
    def test_product_of_conjugates_of_lambda(self, p):
        acc = CycRat.one(p)
        for j in range(1, p):
            acc = acc * lam(p).conjugate(j)
        assert acc == p

    @pytest.mark.parametrize("p", PRIMES)
    def test_norms(self, p):
        assert CycRat.one(p).norm() == 1
        assert zeta_pow(p, 1).norm() == 1
        assert lam(p).norm() == p

    def test_bad_index(self):
        with pytest.raises(BadConjugationIndex):
            lam(5).conjugate(10)

    @given(cyc_integers(), cyc_integers())
    def test_conjugation_is_homomorphism(self, a, b):
        if a.p != b.p:
            return
        for j in range(1, a.p):
            assert (a * b).conjugate(j) == a.conjugate(j) * b.conjugate(j)
            assert (a + b).conjugate(j) == a.conjugate(j) + b.conjugate(j)


class TestFieldOps:
    @given(cyc_integers())
    def test_inverse(self, a):
        if a.is_zero():
            with pytest.raises(DivisionByZero):
                a.inverse()
        else:
            assert a * a.inverse() == 1

    def test_json_round_trip(self):
        a = CycRat(5, [Fraction(1, 3), -2, 0, 7])
        assert CycRat.from_json(5, a.to_json()) == a
        assert a.to_json() == ["1/3", "-2/1", "0/1", "7/1"]
