"""Acceptance criteria, one test each, run at the stated tolerances and runtime budgets.

Every test records a ``[PASS]``/``[FAIL]`` line that is printed in the
"acceptance criteria" section of the pytest summary.
"""

import math
import time
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, special

from sonocasimir.approx import PLATEAU, d_exact, f_factorized
from sonocasimir.bogolubov import Scenario, TruncationPolicy, f_exact, overlap_identity_check
from sonocasimir.matching import Media, a_squared, a_squared_asymptotic, matching_coefficients
from sonocasimir.specfun import bessel_j_half, bessel_n_half
from sonocasimir.spectra import (
    CoverageWarning,
    default_x_grid,
    infinite_table,
    photon_budget_from_table,
    photon_budget_infinite,
    schwinger_static_energy,
    spectrum_finite,
    spectrum_infinite,
)

WATER = Media(1.0, 1.3)
SCHWINGER = Scenario.from_units(40.0, 360.0)
MIN_RADIUS = Scenario.from_units(0.5, 200.0)
AMBIENT = Scenario.from_units(5.0, 200.0)


def test_wronskian_identity(acceptance):
    with acceptance(1, "Wronskian identity J N' - N J' = 2/(pi z)", 1.0):
        worst = 0.0
        for l in (1, 5, 20, 50):
            nu = l + 0.5
            for z in (0.1, 1.0, 10.0, 100.0):
                j, n = bessel_j_half(l, z), bessel_n_half(l, z)
                # derivatives from the order-lowering recurrence
                dj = bessel_j_half(l - 1, z) - nu / z * j
                dn = bessel_n_half(l - 1, z) - nu / z * n
                worst = max(worst, abs((j * dn - n * dj) * math.pi * z / 2.0 - 1.0))
        assert worst <= 1e-10, worst


def test_overlap_identity(acceptance):
    rng = np.random.default_rng(101)
    with acceptance(2, "overlap identity, 50 random draws, residual <= 1e-8", 30.0):
        worst = 0.0
        for _ in range(50):
            l = int(rng.integers(1, 21))
            lam, mu = rng.uniform(0.05, 30.0, size=2)
            b = rng.uniform(0.1, 10.0)
            a = rng.uniform(0.0, b)
            worst = max(worst, overlap_identity_check(l, lam, mu, a, b, rtol=1e-12))
        assert worst <= 1e-8, worst

        # one draw against scipy's adaptive quadrature as an outside reference
        nu, lam, mu, a, b = 4.5, 7.3, 12.9, 0.4, 6.0
        quad = integrate.quad(lambda u: u * special.jv(nu, lam * u) * special.jv(nu, mu * u), a, b,
                              epsabs=0, epsrel=1e-12, limit=400)[0]

        def boundary(u):
            p, q = lam * u, mu * u
            return (p * special.jv(nu + 1, p) * special.jv(nu, q)
                    - q * special.jv(nu + 1, q) * special.jv(nu, p)) / (lam * lam - mu * mu)

        assert abs(boundary(b) - boundary(a) - quad) <= 1e-8 * max(1.0, abs(quad))


def test_junction_identity(acceptance):
    rng = np.random.default_rng(202)
    with acceptance(3, "junction identity at the wall, 50 draws, rel <= 1e-9", 5.0):
        worst = 0.0
        for _ in range(50):
            media = Media(rng.uniform(1.0, 1.5), rng.uniform(1.0, 2.0))
            l = int(rng.integers(1, 21))
            x, y = rng.uniform(0.5, 40.0, size=2)
            nu, w = l + 0.5, media.ratio * y
            c = matching_coefficients(media, l, y)
            # pseudo-Wronskians in u at u = 1, Bessel values and derivatives from scipy
            jx, djx = special.jv(nu, x), x * special.jvp(nu, x)
            parts = [
                (c.a, special.jv(nu, y), y * special.jvp(nu, y)),
                (c.b, special.jv(nu, w), w * special.jvp(nu, w)),
                (c.c, special.yv(nu, w), w * special.yvp(nu, w)),
            ]
            terms = [k * (jx * dg - g * djx) for k, g, dg in parts]
            scale = max(abs(k) * (abs(jx * dg) + abs(g * djx)) for k, g, dg in parts)
            worst = max(worst, abs(terms[0] - terms[1] - terms[2]) / scale)
        assert worst <= 1e-9, worst


def test_a_factor_mean(acceptance):
    with acceptance(4, "mean |A|^2 within 2% of 1, closed-form period average within 1e-6", 10.0):
        y = np.linspace(50.0, 50.0 + 20.0 * np.pi, 40001)
        for l in (1, 2, 7):
            mean = np.trapezoid(a_squared(WATER, l, y), y) / (y[-1] - y[0])
            assert abs(mean - 1.0) <= 0.02, (l, mean)
        # the large-y form has period pi in y
        for media in (WATER, Media(1.0, 2.0), Media(1.4, 1.1)):
            avg = integrate.quad(lambda t: a_squared_asymptotic(media, 3, t), 50.0, 50.0 + np.pi,
                                 epsabs=0, epsrel=1e-13, limit=200)[0] / np.pi
            assert abs(avg - 1.0) <= 1e-6, avg


def test_plateau(acceptance):
    with acceptance(5, "D(30) within 5% of 1/(2 pi^2)", 10.0):
        d = d_exact(30.0)
        assert abs(d / (1.0 / (2.0 * math.pi**2)) - 1.0) <= 0.05, d
        assert abs(PLATEAU - 0.050660) <= 1e-6  # quoted truncated to six decimals
        # near-diagonal scipy partial-wave sum as the outside reference
        x, y = 30.0, 30.0 + 1e-5
        l = np.arange(1, 121)
        jx, jy = special.jv(l + 0.5, x), special.jv(l + 0.5, y)
        wt = x * special.jv(l + 1.5, x) * jy - y * special.jv(l + 1.5, y) * jx
        ref = np.sum((2 * l + 1) * (wt / (x * x - y * y)) ** 2)
        assert_allclose(d, ref, rtol=1e-4)


def test_schwinger_count(acceptance):
    reps = 2000
    # budget is 1 ms per call, timed as the mean over many calls
    with acceptance(6, f"Schwinger photon count 7.40e5 +- 1%, within [0.6e6, 0.85e6] ({reps} calls)", reps * 1e-3):
        start = time.perf_counter()
        for _ in range(reps):
            budget = photon_budget_infinite(WATER, SCHWINGER)
        per_call = (time.perf_counter() - start) / reps
        assert per_call < 1e-3, per_call
    ng, nl = 1.0, 1.3
    rk = 40e-6 * 2.0 * math.pi / 360e-9
    rederived = ((nl - ng) / (nl * ng)) ** 2 * rk**3 / (6.0 * math.pi * nl * ng)
    assert_allclose(budget.n_total, rederived, rtol=1e-12)
    assert_allclose(budget.n_total, 7.40e5, rtol=0.01)
    assert 0.6e6 <= budget.n_total <= 0.85e6


def test_mean_energy(acceptance):
    with acceptance(7, "mean photon energy (3/4) hbar c K / n_liquid", 1.0):
        b = photon_budget_infinite(WATER, SCHWINGER)
        expected = 0.75 * b.hbar_c_k_ev / 1.3
        assert_allclose(b.e_avg_ev, expected, rtol=1e-12)
        table = infinite_table(WATER, SCHWINGER, np.linspace(0.0, SCHWINGER.x_max, 2000))
        assert_allclose(photon_budget_from_table(table).e_avg_ev, expected, rtol=0.01)


def test_four_over_pi(acceptance):
    with acceptance(8, "ambient mid-support finite / infinite median within 15% of 4/pi", 300.0):
        rk = AMBIENT.x_max
        x = np.linspace(0.3 * rk, 0.7 * rk, 81)
        ratio = spectrum_finite(WATER, AMBIENT, x).dndx / spectrum_infinite(WATER, AMBIENT, x)
        median = float(np.median(ratio))
        assert abs(median / (4.0 / math.pi) - 1.0) <= 0.15, median


def test_energy_discrepancy(acceptance):
    with acceptance(9, "min-radius exact vs factorized total energy within 20%", 600.0):
        x = default_x_grid(MIN_RADIUS)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CoverageWarning)
            exact = photon_budget_from_table(spectrum_finite(
                WATER, MIN_RADIUS, x, kernel="exact", policy=TruncationPolicy(tail_epsilon=1e-6)))
            fact = photon_budget_from_table(spectrum_finite(WATER, MIN_RADIUS, x))
        gap = abs(fact.e_total_hck / exact.e_total_hck - 1.0)
        assert gap <= 0.20, gap


def test_null_case(acceptance):
    with acceptance(10, "equal indices give identically zero output", 1.0):
        same = Media(1.3, 1.3)
        x = np.linspace(0.0, 20.0, 41)
        for kernel in ("factorized", "exact"):
            table = spectrum_finite(same, MIN_RADIUS, x, kernel=kernel)
            assert np.all(table.dndx == 0.0)
            b = photon_budget_from_table(table)
            assert (b.n_total, b.e_total_hck, b.e_total_ev, b.e_avg_ev) == (0.0, 0.0, 0.0, 0.0)
        assert np.all(spectrum_infinite(same, MIN_RADIUS, x) == 0.0)
        b = photon_budget_infinite(same, SCHWINGER)
        assert (b.n_total, b.e_total_hck, b.e_total_ev) == (0.0, 0.0, 0.0)
        s = schwinger_static_energy(same, SCHWINGER)
        assert (s.e_hck, s.e_ev, s.n_est) == (0.0, 0.0, 0.0)


def test_property_suite(acceptance):
    rng = np.random.default_rng(303)
    with acceptance(11, "properties: symmetry, continuity, truncation, positivity, R^3 scaling", 120.0):
        x, y = rng.uniform(1e-3, 50.0, size=(2, 400))
        fxy = f_exact(x, y)
        assert np.max(np.abs(fxy - f_exact(y, x))) <= 1e-12 * np.max(fxy)

        for d in (0.5, 2.0, 5.0, 10.0, 25.0):
            ref = f_exact(d, d)
            for s in (1e-7, -1e-7, 1e-6):
                assert abs(f_exact(d, d + s) / ref - 1.0) < 1e-4

        eps = 1e-8
        for a, b in rng.uniform(0.05, 40.0, size=(60, 2)):
            f, last = f_exact(a, b, TruncationPolicy(tail_epsilon=eps), full_output=True)
            doubled = f_exact(a, b, TruncationPolicy(rule="fixed", fixed_l_max=2 * int(last)))
            assert abs(doubled - f) <= eps * f

        grid = default_x_grid(MIN_RADIUS, 30.0, 0.1)
        for kernel in ("factorized", "exact"):
            assert np.all(spectrum_finite(WATER, MIN_RADIUS, grid, kernel=kernel).dndx >= 0.0)
        assert np.all(spectrum_infinite(WATER, MIN_RADIUS, grid) >= 0.0)
        assert np.all(f_factorized(x, y) >= 0.0) and np.all(fxy >= 0.0)

        radii = np.array([0.5, 1.0, 4.0, 45.0])
        n = np.array([photon_budget_infinite(WATER, Scenario.from_units(r, 300.0)).n_total for r in radii])
        assert_allclose(n / radii**3, n[0] / radii[0] ** 3, rtol=1e-12)
        # the finite-volume count at fixed R K does not depend on R: only the spectrum's x scale enters
        small = Scenario.from_units(0.5, 200.0)
        big = Scenario.from_units(1.0, 400.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CoverageWarning)
            ns = photon_budget_from_table(spectrum_finite(WATER, small, grid)).n_total
            nb = photon_budget_from_table(spectrum_finite(WATER, big, grid)).n_total
        assert_allclose(ns, nb, rtol=1e-12)


@pytest.mark.parametrize("media", [Media(1.0, 1.3), Media(1.3, 1.0)])
def test_exchange_keeps_count_positive(media):
    assert photon_budget_infinite(media, SCHWINGER).n_total > 0
