from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swanbound.cyc import zeta_pow
from swanbound.errors import NotASquare, RamifiedPlace
from swanbound.ff import build_tower
from swanbound.localseries import (
    LaurentFq,
    artin_schreier_reduce,
    swan_conductor,
    unramified_frobenius_value,
)


def series(F, terms: dict[int, int], prec=float("inf")) -> LaurentFq:
    return LaurentFq.from_dict(F, {e: F.element(c) for e, c in terms.items()}, prec)


class TestArithmetic:
    def test_geometric_series(self):
        F = build_tower(3)
        inv = series(F, {0: 1, 1: -1}, prec=12).invert()
        assert all(inv.coeff(i) == F.one for i in range(12))

    def test_sqrt_of_one(self):
        F = build_tower(5)
        r = LaurentFq.constant(F.one, prec=6).sqrt(F.one)
        assert all(r.coeff(i) == (F.one if i == 0 else F.zero) for i in range(6))

    def test_sqrt_branches_f5(self):
        F = build_tower(5)
        s = series(F, {0: 1, 1: 1}, prec=10)
        for root in (F.one, -F.one):
            r = s.sqrt(root)
            assert r.coeff(0) == root
            assert (r * r).agrees_with(s)
        assert s.sqrt(F.one).coeff(1) == F.from_int(3)  # 1/2 mod 5

    def test_sqrt_rejects(self):
        F = build_tower(5)
        with pytest.raises(NotASquare):
            series(F, {1: 1}, prec=5).sqrt()
        with pytest.raises(NotASquare):
            series(F, {0: 2}, prec=5).sqrt()

    @given(st.lists(st.integers(0, 4), min_size=1, max_size=6), st.lists(st.integers(0, 4), min_size=1, max_size=6))
    @settings(max_examples=50)
    def test_division_round_trip(self, a, b):
        F = build_tower(5)
        if b[0] == 0:
            b[0] = 1
        A = series(F, dict(enumerate(a)), prec=10)
        B = series(F, dict(enumerate(b)), prec=10)
        assert ((A / B) * B).agrees_with(A)


class TestArtinSchreier:
    def test_examples(self):
        F = build_tower(3)
        r = artin_schreier_reduce(series(F, {-3: 1}))
        assert r.swan == 1
        assert r.reduced.valuation() == -1
        assert swan_conductor(series(F, {-2: 1})) == 2
        assert swan_conductor(series(F, {-4: 1})) == 4
        assert swan_conductor(series(F, {-9: 1, -2: 1})) == 2
        assert swan_conductor(series(F, {0: 2, 3: 1})) == 0

    def test_constant_term_when_unramified(self):
        F = build_tower(3)
        r = artin_schreier_reduce(series(F, {-3: 1, 0: 2, 1: 1}))
        # t^-3 -> t^-1 leaves the constant untouched
        assert r.swan == 1
        r = artin_schreier_reduce(series(F, {0: 2, 4: 1}))
        assert r.swan == 0 and r.constant_term == F.from_int(2)

    def test_frobenius_values(self):
        F3 = build_tower(3)
        assert unramified_frobenius_value(artin_schreier_reduce(series(F3, {}))) == 1
        assert unramified_frobenius_value(artin_schreier_reduce(series(F3, {0: 1}))) == zeta_pow(3, 1)
        F9 = build_tower(3, 2)
        i = F9.element([0, 1])
        rep = artin_schreier_reduce(LaurentFq.constant(i))
        assert unramified_frobenius_value(rep) == 1
        with pytest.raises(RamifiedPlace):
            unramified_frobenius_value(artin_schreier_reduce(series(F3, {-1: 1})))

    @given(st.data())
    @settings(max_examples=200)
    def test_invariance_under_artin_schreier_change(self, data):
        """Swan conductor and Frobenius value are unchanged by g -> g + h^p - h."""
        p, a = data.draw(st.sampled_from([(3, 1), (5, 1), (3, 2)]))
        F = build_tower(p, a)
        elt = st.integers(0, F.order - 1).map(F.from_code)
        g_terms = data.draw(st.dictionaries(st.integers(-12, 2), elt, max_size=5))
        h_terms = data.draw(st.dictionaries(st.integers(-4, 0), elt, max_size=3))
        g = LaurentFq.from_dict(F, g_terms)
        h = LaurentFq.from_dict(F, h_terms)
        g2 = g + h**p - h
        r1, r2 = artin_schreier_reduce(g), artin_schreier_reduce(g2)
        assert r1.swan == r2.swan
        assert r1.swan % p != 0 or r1.swan == 0
        if r1.swan == 0:
            assert unramified_frobenius_value(r1) == unramified_frobenius_value(r2)
