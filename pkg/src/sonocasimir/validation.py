"""Self-checks of the numerical core, grouped into named families.

Every check returns a :class:`CheckResult`; ``run_checks`` runs a selection
and can scale every Bessel J value by ``1 + perturb`` to confirm that the
suite notices a small fault.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .approx import PLATEAU, d_exact
from .bogolubov import Scenario, TruncationPolicy, f_exact, overlap_identity_check
from .errors import CasimirError
from .matching import Media, a_squared, a_squared_asymptotic, matching_coefficients
from .specfun import _j_half, _n_half, perturbed
from .spectra import (
    CoverageWarning,
    default_x_grid,
    photon_budget_from_table,
    spectrum_finite,
    spectrum_infinite,
)

SEED = 20240517
DEFAULT_MEDIA = Media(1.0, 1.3)


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    def as_dict(self):
        d = asdict(self)
        for k in ("value", "tolerance"):
            if not math.isfinite(d[k]):
                d[k] = None
        d["status"] = "pass" if self.passed else "fail"
        return d


def _result(name, value, tolerance, **detail):
    value = float(value)
    return CheckResult(name, bool(value <= tolerance), value, tolerance, detail)


def check_wronskian(orders=(1, 5, 20, 50), args=(0.1, 1.0, 10.0, 100.0), tol=1e-10):
    """``J_nu N_nu' - N_nu J_nu' = 2/(pi z)``, written as ``J_{nu+1} N_nu - J_nu N_{nu+1}``."""
    lmax = max(orders) + 1
    z = np.asarray(args, dtype=float)
    j = _j_half(lmax, z)
    n = _n_half(lmax, z)
    worst = 0.0
    for l in orders:
        w = j[l + 1] * n[l] - j[l] * n[l + 1]
        worst = max(worst, float(np.max(np.abs(w * np.pi * z / 2.0 - 1.0))))
    return _result("wronskian", worst, tol, orders=list(orders), args=list(args))


def _junction_residual(media, l, x, y):
    # pseudo-Wronskians in u at u = 1: f g' - g f' with f = J(xu)
    w = media.ratio * y
    jx = _j_half(l + 1, x)
    jy = _j_half(l + 1, y)
    jw = _j_half(l + 1, w)
    nw = _n_half(l + 1, w)
    nu = l + 0.5

    def deriv(t, z):
        return nu * t[l] - z * t[l + 1]

    def pw(g, z):
        a, b = jx[l] * deriv(g, z), g[l] * deriv(jx, x)
        return a - b, abs(a) + abs(b)

    c = matching_coefficients(media, l, y)
    terms = [(c.a, pw(jy, y)), (c.b, pw(jw, w)), (c.c, pw(nw, w))]
    lhs, rhs1, rhs2 = (k * v for k, (v, _) in terms)
    # scale by the products before cancellation, so x = y (both sides zero) is judged fairly
    scale = max(max(abs(k) * m for k, (_, m) in terms), 1e-300)
    return abs(lhs - rhs1 - rhs2) / scale


def check_junction(draws=50, tol=1e-9, seed=SEED):
    """Wall identity ``A W[J_x, J_y] = B W[J_x, J_w] + C W[J_x, N_w]``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        media = Media(rng.uniform(1.0, 1.5), rng.uniform(1.0, 2.0))
        l = int(rng.integers(1, 21))
        x, y = rng.uniform(0.5, 40.0, size=2)
        worst = max(worst, _junction_residual(media, l, x, y))
    return _result("junction", worst, tol, draws=draws)


def check_overlap(draws=50, tol=1e-8, seed=SEED):
    """Finite-interval integration-by-parts identity for ``u J(lam u) J(mu u)``."""
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(draws):
        l = int(rng.integers(1, 21))
        lam, mu = rng.uniform(0.5, 30.0, size=2)
        b = rng.uniform(0.5, 10.0)
        a = rng.uniform(0.0, b)
        worst = max(worst, overlap_identity_check(l, lam, mu, a, b, rtol=1e-12))
    return _result("overlap", worst, tol, draws=draws)


def check_symmetry(samples=60, tol=1e-12, seed=SEED):
    """``F(x, y) = F(y, x)`` relative to the largest sampled value."""
    rng = np.random.default_rng(seed + 2)
    x, y = rng.uniform(0.05, 50.0, size=(2, samples))
    fxy = f_exact(x, y)
    fyx = f_exact(y, x)
    return _result("symmetry", np.max(np.abs(fxy - fyx)) / np.max(fxy), tol, samples=samples)


def check_diagonal(points=(2.0, 5.0, 10.0), step=1e-7, tol=1e-4):
    """Continuity of ``F`` across the switch to the diagonal limit."""
    worst = 0.0
    for x in points:
        d = f_exact(x, x)
        for s in (step, -step):
            worst = max(worst, abs(f_exact(x, x + s) - d) / d)
    return _result("diagonal", worst, tol, points=list(points), step=step)


def check_period_average(media=DEFAULT_MEDIA, tol_numeric=0.02, tol_closed=1e-6):
    """Mean of ``|A|**2`` is 1, numerically over twenty periods and in closed form over one."""
    y = np.linspace(50.0, 50.0 + 20.0 * np.pi, 20001)
    numeric = 0.0
    for l in (1, 2):
        mean = np.trapezoid(a_squared(media, l, y), y) / (y[-1] - y[0])
        numeric = max(numeric, abs(mean - 1.0))
    # one period of the asymptotic form is pi in y
    yp = np.linspace(50.0, 50.0 + np.pi, 4097)
    closed = abs(np.trapezoid(a_squared_asymptotic(media, 1, yp), yp) / np.pi - 1.0)
    value = max(numeric / tol_numeric, closed / tol_closed)
    return _result("period-average", value, 1.0, numeric_deviation=numeric, closed_deviation=closed)


def check_plateau(x=30.0, tol=0.05):
    """``D(30)`` against the large-``x`` limit ``1/(2 pi^2)``."""
    d = d_exact(x)
    return _result("plateau", abs(d / PLATEAU - 1.0), tol, d=d)


def check_four_over_pi(media=DEFAULT_MEDIA, tol=0.15):
    """Mid-support finite spectrum against ``4/pi`` times the infinite one."""
    scenario = Scenario.from_units(5.0, 200.0)
    rk = scenario.x_max
    x = np.linspace(0.3 * rk, 0.7 * rk, 81)
    finite = spectrum_finite(media, scenario, x).dndx
    ratio = float(np.median(finite / spectrum_infinite(media, scenario, x)))
    return _result("four-over-pi", abs(ratio * np.pi / 4.0 - 1.0), tol, median_ratio=ratio)


def check_energy_discrepancy(media=DEFAULT_MEDIA, tol=0.20, tail_epsilon=1e-6):
    """Total energy of the factorized spectrum against the exact one (smallest bubble)."""
    scenario = Scenario.from_units(0.5, 200.0)
    x = default_x_grid(scenario)
    policy = TruncationPolicy(tail_epsilon=tail_epsilon)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CoverageWarning)
        e_exact = photon_budget_from_table(
            spectrum_finite(media, scenario, x, kernel="exact", policy=policy)).e_total_hck
        e_fact = photon_budget_from_table(spectrum_finite(media, scenario, x)).e_total_hck
    return _result("energy-discrepancy", abs(e_fact / e_exact - 1.0), tol,
                   e_exact_hck=e_exact, e_factorized_hck=e_fact)


CHECKS = {
    "wronskian": check_wronskian,
    "junction": check_junction,
    "overlap": check_overlap,
    "symmetry": check_symmetry,
    "diagonal": check_diagonal,
    "period-average": check_period_average,
    "plateau": check_plateau,
    "four-over-pi": check_four_over_pi,
    "energy-discrepancy": check_energy_discrepancy,
}


def run_checks(names=None, perturb: float = 0.0):
    """Run the named checks (all by default) in a fixed order.

    A check that raises counts as failed, with the error in ``detail``.
    """
    names = list(CHECKS) if not names else list(names)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")
    results = []
    with perturbed(perturb):
        for name in names:
            try:
                results.append(CHECKS[name]())
            except CasimirError as exc:
                results.append(CheckResult(name, False, math.inf, math.nan,
                                           {"error": f"{type(exc).__name__}: {exc}"}))
    return results
