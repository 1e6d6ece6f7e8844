import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixpoisson.errors import SingularSeriesError
from mixpoisson.series import TruncatedSeries, coeff_binom_4z, tree_resolvent_coeff, tree_series

fractions_st = st.builds(F, st.integers(-6, 6), st.integers(1, 5))


def series_st(order):
    return st.lists(fractions_st, min_size=order + 1, max_size=order + 1).map(TruncatedSeries.from_coeffs)


class TestTreeSeries:
    def test_coefficients(self):
        t = tree_series(6)
        assert t.coeff(0) == 0
        assert t.coeff(1) == 1
        assert t.coeff(3) == F(3, 2)
        assert t.coeff(5) == F(625, 120)

    def test_resolvent_power_one_is_mapping_egf(self):
        # coefficients of (1 - T)^{-1} are n^n/n!
        t = tree_series(30)
        f = (TruncatedSeries.constant(1, 30) - t).neg_pow(1)
        for n in range(31):
            assert f.coeff(n) == F(n**n if n else 1, math.factorial(n))

    def test_functional_equation(self):
        # T = z e^T through order 20, exact exponential of series
        t = tree_series(20)
        assert t.exp().shift(1).truncate(20) == t

    def test_neg_pow_two_coefficient_three(self):
        # independent oracle: expand 1 + 2T + 3T^2 + 4T^3 through z^3
        t = tree_series(3)
        t2 = t * t
        t3 = t2 * t
        oracle = 2 * t.coeff(3) + 3 * t2.coeff(3) + 4 * t3.coeff(3)
        got = (TruncatedSeries.constant(1, 3) - t).neg_pow(2).coeff(3)
        assert got == oracle == F(13)

    def test_lagrange_route_matches_series_route(self):
        t = tree_series(30)
        one_minus = TruncatedSeries.constant(1, 30) - t
        for a in (1, 2, 3, 4):
            f = one_minus.neg_pow(a)
            for m in range(31):
                assert tree_resolvent_coeff(m, a) == f.coeff(m)


class TestSeriesArithmetic:
    def test_integrate_constant(self):
        assert TruncatedSeries.constant(1, 3).integrate().coeffs == (0, 1, 0, 0, 0)

    def test_integrate_shifts_and_divides(self):
        s = TruncatedSeries.from_coeffs([F(2), F(3), F(4)])
        assert s.integrate().coeffs == (0, 2, F(3, 2), F(4, 3))

    def test_neg_pow_singular(self):
        with pytest.raises(SingularSeriesError):
            tree_series(5).neg_pow(1)

    def test_mul_truncates_to_min_order(self):
        a = TruncatedSeries.from_coeffs([1, 1, 1, 1, 1])
        b = TruncatedSeries.from_coeffs([1, 2])
        assert (a * b).order == 1
        assert (a + b).order == 1

    @given(series_st(6), series_st(6))
    @settings(max_examples=30, deadline=None)
    def test_mul_commutative(self, a, b):
        assert a * b == b * a

    @given(series_st(5), series_st(5), series_st(5))
    @settings(max_examples=20, deadline=None)
    def test_mul_distributes(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    def test_reciprocal_roundtrip(self):
        s = TruncatedSeries.from_coeffs([F(2), F(-1), F(5, 3), F(0), F(7)])
        prod = s * s.reciprocal()
        assert prod.coeffs == (1, 0, 0, 0, 0)

    def test_shift(self):
        s = TruncatedSeries.from_coeffs([1, 2, 3])
        assert s.shift(1).coeffs == (0, 1, 2)
        assert s.shift(5).coeffs == (0, 0, 0)

    def test_compose_requires_zero_constant(self):
        s = TruncatedSeries.from_coeffs([1, 1])
        with pytest.raises(ValueError):
            s.compose(TruncatedSeries.from_coeffs([1, 1]))


class TestCoeffBinom4z:
    def test_geometric(self):
        for m in range(8):
            assert coeff_binom_4z(1, 1, m) == 4**m

    def test_half_integer(self):
        assert coeff_binom_4z(1, 2, 1) == 2
        assert coeff_binom_4z(3, 2, 2) == 30
        # (1-4z)^{-1/2} generates central binomials C(2m, m)
        for m in range(9):
            assert coeff_binom_4z(1, 2, m) == math.comb(2 * m, m)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            coeff_binom_4z(-1, 2, 3)
