"""Semi-analytic approximants of the Bogolubov kernel and their error reports.

The exact kernel is well described by a product of its diagonal ``D`` at the
mean frequency and a sinc**2 kernel in the frequency difference:

    F(x, y) ~ D((x + y) / 2) * sinc_kernel(x - y)

with the rational fit ``D(s) ~ (1/2 pi^2) 2 (s-1)^2 / (3 + 2 (s-1)^2)`` for
``s >= 1`` and zero below.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .bogolubov import Scenario, TruncationPolicy, _kernel, kernel_block, kernel_tables, _prepare
from .errors import DomainError
from .matching import Media
from .specfun import _checked_argument, _scalar

PLATEAU = 1.0 / (2.0 * math.pi**2)


def d_exact(x, policy: TruncationPolicy | None = None, media: Media | None = None,
            a_factor: str = "unit"):
    """Diagonal ``D(x) = F(x, x)`` of the exact kernel."""
    x = _checked_argument(x, "x")
    return _kernel(x, x, policy, media, a_factor)


def d_approx(x):
    """Rational approximant of ``D``; a hard step makes it vanish for ``x < 1``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("x must be finite and non-negative")
    s2 = 2.0 * (x - 1.0) ** 2
    return _scalar(np.where(x >= 1.0, PLATEAU * s2 / (3.0 + s2), 0.0))


def sinc_kernel(t):
    """``sin(pi t/4)**2 / (pi t/4)**2``, exactly 1 at ``t = 0``."""
    t = np.asarray(t, dtype=float)
    return _scalar(np.sinc(t / 4.0) ** 2)


def _factorized(x, y):
    s = x + y - 2.0
    return np.where(s >= 0.0, PLATEAU * s * s / (6.0 + s * s), 0.0) * np.sinc((x - y) / 4.0) ** 2


def f_factorized(x, y):
    """Factorized kernel ``d_approx((x+y)/2) * sinc_kernel(x-y)``; broadcasts like ``f_exact``."""
    x = _checked_argument(x, "x")
    y = _checked_argument(y, "y")
    return _scalar(_factorized(x, y))


@dataclass(frozen=True)
class GridSpec:
    """Uniform ``nx`` by ``ny`` grid on ``[0, x_hi] x [0, y_hi]``.

    ``None`` bounds default to ``1.2 R K``.
    """

    nx: int = 201
    ny: int = 201
    x_hi: float | None = None
    y_hi: float | None = None

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise DomainError("a grid needs at least two points per axis")
        for v in (self.x_hi, self.y_hi):
            if v is not None and not (math.isfinite(v) and v > 0):
                raise DomainError("grid bounds must be finite and positive")

    def axes(self, scenario: Scenario):
        span = 1.2 * scenario.x_max
        x_hi = self.x_hi if self.x_hi is not None else span
        y_hi = self.y_hi if self.y_hi is not None else span
        return np.linspace(0.0, x_hi, self.nx), np.linspace(0.0, y_hi, self.ny)


@dataclass(frozen=True)
class ApproximationReport:
    max_abs_error: float
    rms_error: float
    energy_discrepancy_fraction: float
    grid: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def exact_kernel_grid(x, y, policy=None, media=None, a_factor="unit"):
    """``f_exact`` on the outer grid ``x`` by ``y``; points with a zero coordinate give 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _, _, policy, gain, lcap = _prepare(x, y, policy, media, a_factor)
    jx, _ = kernel_tables(x, lcap)
    jy, inv_amp = kernel_tables(y, lcap, media, a_factor)
    total, _ = kernel_block(
        x[:, None], y[None, :], jx[:, :, None],
        jy[:, None, :], None if inv_amp is None else inv_amp[:, None, :],
        policy, lcap, gain,
    )
    return total


def approximation_report(media: Media, scenario: Scenario,
                         policy: TruncationPolicy | None = None,
                         grid_spec: GridSpec | None = None,
                         a_factor: str = "unit", threads: int = 0) -> ApproximationReport:
    """Compare ``f_exact`` with ``f_factorized`` pointwise and through the total energy."""
    from .spectra import CoverageWarning, default_x_grid, photon_budget_from_table, spectrum_finite

    grid_spec = grid_spec or GridSpec()
    x, y = grid_spec.axes(scenario)
    exact = exact_kernel_grid(x, y, policy, media, a_factor)
    approx = _factorized(x[:, None], y[None, :])
    err = np.abs(exact - approx)

    xs = default_x_grid(scenario)
    kw = dict(policy=policy, a_factor=a_factor, threads=threads)
    with warnings.catch_warnings():
        # both tables share the grid, so a slowly decaying tail largely cancels in the ratio
        warnings.simplefilter("ignore", CoverageWarning)
        e_exact = photon_budget_from_table(spectrum_finite(media, scenario, xs, kernel="exact", **kw)).e_total_hck
        e_fact = photon_budget_from_table(spectrum_finite(media, scenario, xs, kernel="factorized", **kw)).e_total_hck
    disc = abs(e_fact - e_exact) / e_exact if e_exact > 0 else 0.0

    return ApproximationReport(
        max_abs_error=float(err.max()),
        rms_error=float(np.sqrt(np.mean(err * err))),
        energy_discrepancy_fraction=float(disc),
        grid={
            "nx": grid_spec.nx, "ny": grid_spec.ny,
            "x_hi": float(x[-1]), "y_hi": float(y[-1]),
        },
    )
