import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from sonocasimir.errors import DomainError, RangeError
from sonocasimir.specfun import (
    ModeIndex,
    bessel_j_half,
    bessel_j_half_table,
    bessel_j_large_order,
    bessel_n_half,
    bessel_n_half_table,
    downward_start,
    perturbed,
    pseudo_wronskian,
    pseudo_wronskian_diagonal,
)


def mp_j(l, z):
    return float(mpmath.besselj(l + 0.5, z, maxprec=60000, maxterms=10**7))


def mp_y(l, z):
    return float(mpmath.bessely(l + 0.5, z, maxprec=60000, maxterms=10**7))


class TestModeIndex:
    def test_nu(self):
        assert ModeIndex(3).nu == 3.5

    @pytest.mark.parametrize("bad", [-1, 1.5, True, "2"])
    def test_rejects(self, bad):
        with pytest.raises(DomainError):
            ModeIndex(bad)


class TestClosedForms:
    def test_j_examples(self):
        assert_allclose(bessel_j_half(0, math.pi / 2), 2 / math.pi, rtol=1e-14)
        assert abs(bessel_j_half(0, math.pi)) < 1e-16
        assert_allclose(bessel_j_half(ModeIndex(1), math.pi), math.sqrt(2) / math.pi, rtol=1e-14)

    def test_n_examples(self):
        assert abs(bessel_n_half(0, math.pi / 2)) < 1e-16
        assert_allclose(bessel_n_half(0, math.pi), math.sqrt(2) / math.pi, rtol=1e-14)
        assert_allclose(bessel_n_half(1, math.pi / 2), -2 / math.pi, rtol=1e-14)


@pytest.mark.parametrize("l", [0, 1, 2, 7, 30, 150, 600, 2000])
@pytest.mark.parametrize("z", [1e-3, 0.37, 1.0, 9.99, 55.5, 401.0, 2500.0, 1e4])
def test_j_against_mpmath(l, z):
    ref = mp_j(l, z)
    got = bessel_j_half(l, z)
    if ref == 0.0:
        assert got == 0.0
    elif abs(ref) < 1e-290:
        # near underflow only the magnitude order matters
        assert abs(got) < 1e-280
    else:
        assert_allclose(got, ref, rtol=1e-12)


@pytest.mark.parametrize("l", [0, 1, 5, 40, 300])
@pytest.mark.parametrize("z", [0.5, 3.0, 77.0, 900.0])
def test_n_against_mpmath(l, z):
    ref = mp_y(l, z)
    got = bessel_n_half(l, z)
    if abs(ref) > 1e300:
        assert got < -1e300 or math.isinf(got)
    else:
        assert_allclose(got, ref, rtol=1e-12)


def test_tables_match_single_orders():
    z = np.array([0.2, 4.0, 31.0])
    jt = bessel_j_half_table(12, z)
    nt = bessel_n_half_table(12, z)
    assert jt.shape == (13, 3)
    for l in (0, 6, 12):
        assert_allclose(jt[l], bessel_j_half(l, z), rtol=0)
        assert_allclose(nt[l], bessel_n_half(l, z), rtol=0)


def test_neumann_overflow_saturates():
    assert bessel_n_half(400, 0.5) == -math.inf


def test_downward_start():
    assert downward_start(10) == 30
    assert downward_start(1000) == 1000 + 200


@pytest.mark.parametrize("z", [0.1, 1.0, 10.0, 100.0])
@pytest.mark.parametrize("l", [1, 5, 20, 50])
def test_true_wronskian(l, z):
    # J N' - N J' = J_{nu+1} N_nu - J_nu N_{nu+1} = 2/(pi z)
    j = bessel_j_half_table(l + 1, z)
    n = bessel_n_half_table(l + 1, z)
    w = j[l + 1] * n[l] - j[l] * n[l + 1]
    assert_allclose(w, 2 / (math.pi * z), rtol=1e-10)


@given(st.integers(1, 300), st.floats(0.01, 5000.0))
@settings(max_examples=200, deadline=None)
def test_recurrence(l, z):
    j = bessel_j_half_table(l + 1, z)
    lhs = j[l - 1] + j[l + 1]
    rhs = (2 * l + 1) / z * j[l]
    scale = max(abs(j[l - 1]), abs(j[l + 1]), abs(rhs), 1e-300)
    assert abs(lhs - rhs) <= 1e-10 * scale


class TestPseudoWronskian:
    def test_equal_arguments(self):
        assert pseudo_wronskian(1, 2.0, 2.0) == 0.0

    @given(st.integers(0, 60), st.floats(0.01, 200.0), st.floats(0.01, 200.0))
    @settings(max_examples=200, deadline=None)
    def test_antisymmetric(self, l, x, y):
        assert pseudo_wronskian(l, x, y) == -pseudo_wronskian(l, y, x)

    def test_near_diagonal_value(self):
        # the determinant itself fixes the sign: J(x) y J'(y) - J(y) x J'(x)
        with mpmath.workdps(40):
            x, y = mpmath.pi, mpmath.pi - mpmath.mpf("1e-6")
            jd = lambda z: z * mpmath.besselj(1.5, z, derivative=1)
            ref = float(mpmath.besselj(1.5, x) * jd(y) - mpmath.besselj(1.5, y) * jd(x))
        got = pseudo_wronskian(1, math.pi, math.pi - 1e-6)
        assert_allclose(got, ref, rtol=1e-5)
        assert_allclose(got, pseudo_wronskian_diagonal(1, math.pi) * (-1e-6), rtol=1e-5)

    def test_against_mpmath_determinant(self):
        l, x, y = 4, 3.3, 7.9
        nu = l + 0.5

        def jd(z):
            # z J'_nu(z)
            return z * mpmath.besselj(nu, z, derivative=1)

        with mpmath.workdps(40):
            ref = float(mpmath.besselj(nu, x) * jd(y) - mpmath.besselj(nu, y) * jd(x))
        assert_allclose(pseudo_wronskian(l, x, y), ref, rtol=1e-12)


class TestDiagonal:
    def test_example(self):
        assert_allclose(pseudo_wronskian_diagonal(1, math.pi), -2 / math.pi, rtol=1e-13)

    def test_small_argument(self):
        assert abs(pseudo_wronskian_diagonal(1, 1e-6)) < 1e-12

    @pytest.mark.parametrize("l", [0, 1, 3, 10, 25])
    @pytest.mark.parametrize("x", [0.7, 4.0, 19.5])
    def test_difference_quotient(self, l, x):
        h = 1e-5
        # the diagonal form is the limit of W(x, y) / (y - x)
        quotient = pseudo_wronskian(l, x - h, x + h) / (2 * h)
        assert_allclose(quotient, pseudo_wronskian_diagonal(l, x), rtol=1e-6, atol=1e-14)

    @pytest.mark.parametrize("l", [1, 6, 15])
    @pytest.mark.parametrize("x", [1.3, 8.0])
    def test_richardson(self, l, x):
        def q(h):
            return pseudo_wronskian(l, x - h, x + h) / (2 * h)

        h = 1e-3
        # the quotient is even in h, so one Richardson step removes the h^2 term
        extrap = (4 * q(h / 2) - q(h)) / 3
        assert_allclose(extrap, pseudo_wronskian_diagonal(l, x), rtol=1e-8, atol=1e-14)


class TestLargeOrder:
    def test_suppression(self):
        assert bessel_j_large_order(50, 1.0) < 1e-80

    def test_ratio(self):
        assert_allclose(bessel_j_half(40, 2.0) / bessel_j_large_order(40, 2.0), 1.0, atol=0.1)

    def test_monotone(self):
        vals = [bessel_j_large_order(l, 3.0) for l in range(5, 40)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_bounds_j(self):
        for l in range(5, 60):
            for z in (0.5, 2.0, 4.0):
                if l + 0.5 > math.e * z / 2:
                    assert abs(bessel_j_half(l, z)) <= bessel_j_large_order(l, z)

    def test_outside_region(self):
        with pytest.raises(DomainError):
            bessel_j_large_order(1, 10.0)


class TestErrors:
    @pytest.mark.parametrize("z", [0.0, -1.0, math.nan, math.inf])
    def test_domain(self, z):
        with pytest.raises(DomainError):
            bessel_j_half(1, z)
        with pytest.raises(DomainError):
            bessel_n_half(1, z)

    def test_range(self):
        with pytest.raises(RangeError):
            bessel_j_half(1, 2e4)
        with pytest.raises(RangeError):
            bessel_j_half(2001, 1.0)


def test_perturbation_is_scoped():
    base = bessel_j_half(2, 3.0)
    with perturbed(1e-3):
        assert_allclose(bessel_j_half(2, 3.0), base * 1.001, rtol=1e-15)
    assert bessel_j_half(2, 3.0) == base
