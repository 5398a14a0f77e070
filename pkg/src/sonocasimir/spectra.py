r"""Photon spectra, photon and energy budgets, and the static Casimir comparator.

The dimensionless spectrum of the out photons is

.. math::

    \frac{dN}{dx} = \frac{(n_l^2 - n_g^2)^2}{n_l^3 n_g^3}
        \int_0^{RK} \left[\frac{y^2}{n_g x + n_l y}\right]^2 F(x, y)\, dy

with ``F`` either the exact partial-wave kernel or its factorized
approximant. A photon at ``x`` has energy ``hbar c K x / (n_l R K)``, so
energies are reported in units of ``hbar c K`` as
``E = (1 / (n_l R K)) * integral of x dN/dx``.
"""
from __future__ import annotations

import contextvars
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .approx import _factorized
from .bogolubov import Scenario, TruncationPolicy, _prepare, kernel_block, kernel_tables
from .errors import ConsistencyError, DomainError, QuadratureError, TruncationError
from .matching import Media

HBAR_C_EV_NM = 197.3269804
KERNELS = ("exact", "factorized")
MODES = ("exact", "factorized", "infinite")
CHUNK_ROWS = 32


class CoverageWarning(UserWarning):
    """The tabulated spectrum is cut off while still significant."""


def hbar_c_k_ev(scenario: Scenario) -> float:
    """``hbar c K`` in eV."""
    return HBAR_C_EV_NM * scenario.cutoff * 1e-9


def _contrast(media: Media) -> float:
    ng, nl = media.n_gas, media.n_liquid
    return ((nl - ng) / (nl * ng)) ** 2


@dataclass(frozen=True)
class QuadSpec:
    """Composite Gauss-Legendre rule in ``y``.

    Each point is also integrated with panels of half the width; the two must
    agree to ``rtol * (|I| + 1e-6 * peak)``.
    """

    panel_width: float = 1.0
    order: int = 16
    rtol: float = 1e-5
    check: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.panel_width) and self.panel_width > 0):
            raise DomainError("panel_width must be positive")
        if self.order < 2:
            raise DomainError("order must be at least 2")
        if not (0 < self.rtol < 1):
            raise DomainError("rtol must lie in (0, 1)")


@dataclass(frozen=True)
class SpectrumTable:
    mode: str
    x: np.ndarray
    dndx: np.ndarray
    media: Media
    scenario: Scenario
    a_factor: str = "unit"

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"unknown spectrum mode {self.mode!r}")
        x = np.asarray(self.x, dtype=float)
        d = np.asarray(self.dndx, dtype=float)
        if x.ndim != 1 or x.shape != d.shape:
            raise DomainError("x and dndx must be 1-d arrays of equal length")
        if x.size and (np.any(np.diff(x) <= 0) or x[0] < 0):
            raise DomainError("x must be non-negative and strictly increasing")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ConsistencyError("spectral density must be finite and non-negative")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "dndx", d)

    @property
    def points(self):
        return list(zip(self.x.tolist(), self.dndx.tolist()))


@dataclass(frozen=True)
class PhotonBudget:
    n_total: float
    e_total_hck: float
    e_total_ev: float
    e_avg_ev: float
    hbar_c_k_ev: float = field(default=0.0)


@dataclass(frozen=True)
class StaticEnergy:
    """Bulk static Casimir energy and the photon count it could pay for.

    ``n_est`` divides the energy by the mean photon energy ``0.75 hbar c K / n_l``;
    it is an order-of-magnitude figure.
    """

    e_hck: float
    e_ev: float
    n_est: float


def default_x_grid(scenario: Scenario, x_max: float | None = None, dx: float = 0.05):
    """``[0, x_max]`` in steps of about ``dx``; ``x_max`` defaults to ``2 R K + 10``."""
    if x_max is None:
        x_max = 2.0 * scenario.x_max + 10.0
    if not (x_max > 0 and dx > 0 and math.isfinite(x_max) and math.isfinite(dx)):
        raise DomainError("x_max and dx must be positive")
    return np.linspace(0.0, x_max, round(x_max / dx) + 1)


def spectrum_infinite(media: Media, scenario: Scenario, x):
    """Infinite-volume spectrum ``x**2 / (2 pi n_l n_g) * contrast`` for ``x <= R K``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("x must be finite and non-negative")
    coef = _contrast(media) / (2.0 * math.pi * media.n_liquid * media.n_gas)
    out = np.where(x <= scenario.x_max, coef * x * x, 0.0)
    return float(out) if out.ndim == 0 else out


def _gauss_nodes(edges, order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    y = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return y, w


def _panel_edges(top, width, breaks=()):
    n = max(1, math.ceil(top / width - 1e-12))
    edges = np.minimum(np.arange(n + 1) * width, top)
    edges[-1] = top
    extra = [b for b in breaks if 0.0 < b < top]
    if extra:
        edges = np.unique(np.concatenate([edges, extra]))
    return edges


def _rules(top, quad, breaks=()):
    base = _gauss_nodes(_panel_edges(top, quad.panel_width, breaks), quad.order)
    fine = _gauss_nodes(_panel_edges(top, 0.5 * quad.panel_width, breaks), quad.order)
    return base, fine


def _weight(media, x, y):
    # [y^2 / (n_g x + n_l y)]^2 on an outer grid
    r = y[None, :] ** 2 / (media.n_gas * x[:, None] + media.n_liquid * y[None, :])
    return r * r


class _ExactIntegrand:
    """Exact-kernel integrand with Bessel tables for the y nodes built once."""

    def __init__(self, media, scenario, x, rules, policy, a_factor):
        self.media = media
        ys = np.concatenate([r[0] for r in rules])
        _, _, self.policy, self.gain, self.lcap = _prepare(
            np.append(x, 0.0), ys, policy, media, a_factor
        )
        self.a_factor = a_factor
        self.tables = []
        for y, _ in rules:
            jy, inv = kernel_tables(y, self.lcap, media, a_factor)
            self.tables.append((jy[:, None, :], None if inv is None else inv[:, None, :]))

    def __call__(self, x, k, y):
        jx, _ = kernel_tables(x, self.lcap)
        jy, inv = self.tables[k]
        try:
            f, _ = kernel_block(x[:, None], y[None, :], jx[:, :, None], jy, inv,
                                self.policy, self.lcap, self.gain)
        except TruncationError as exc:
            bad = x[np.asarray(exc.mask).any(axis=1)]
            raise TruncationError(
                "partial-wave sum not certified at x = "
                + ", ".join(f"{v:.12g}" for v in bad[:10]),
                mask=None,
            ) from exc
        return _weight(self.media, x, y) * f


def spectrum_finite(media: Media, scenario: Scenario, x_grid, quad_spec: QuadSpec | None = None,
                    kernel: str = "factorized", policy: TruncationPolicy | None = None,
                    a_factor: str = "unit", threads: int = 0) -> SpectrumTable:
    """Finite-volume spectrum on ``x_grid`` by composite Gauss-Legendre quadrature in ``y``.

    Parameters
    ----------
    x_grid : array_like
        Non-negative, strictly increasing.
    kernel : {"factorized", "exact"}
    threads : int
        Worker threads over blocks of rows; 0 picks the CPU count. Results
        do not depend on it.

    Raises
    ------
    QuadratureError
        Panel halving changed some points beyond tolerance; ``points`` lists them.
    ConsistencyError
        A density came out negative or not finite.
    """
    if kernel not in KERNELS:
        raise DomainError(f"kernel must be one of {KERNELS}, got {kernel!r}")
    quad = quad_spec or QuadSpec()
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DomainError("x_grid must be a non-empty 1-d array")
    if not np.all(np.isfinite(x)) or x[0] < 0 or np.any(np.diff(x) <= 0):
        raise DomainError("x_grid must be finite, non-negative and strictly increasing")
    top = scenario.x_max
    ng, nl = media.n_gas, media.n_liquid
    pref = (nl * nl - ng * ng) ** 2 / (nl**3 * ng**3)

    shared = _rules(top, quad)
    exact = _ExactIntegrand(media, scenario, x, shared, policy, a_factor) if kernel == "exact" else None

    def integrals(rows):
        xr = x[rows]
        if exact is not None:
            return tuple(np.sum(exact(xr, k, y) * w[None, :], axis=1) for k, (y, w) in enumerate(shared))
        base = np.empty(xr.size)
        fine = np.empty(xr.size)
        plain = xr >= 2.0
        if plain.any():
            xp = xr[plain]
            base[plain], fine[plain] = (
                np.sum(_weight(media, xp, y) * _factorized(xp[:, None], y[None, :]) * w[None, :], axis=1)
                for y, w in shared
            )
        for i in np.flatnonzero(~plain):
            # the step of the factorized kernel sits at y = 2 - x
            xa = xr[i:i + 1]
            base[i], fine[i] = (
                float(np.sum(_weight(media, xa, y)[0] * _factorized(xa[0], y) * w))
                for y, w in _rules(top, quad, (2.0 - xa[0],))
            )
        return base, fine

    chunks = [np.arange(s, min(s + CHUNK_ROWS, x.size)) for s in range(0, x.size, CHUNK_ROWS)]
    workers = threads if threads > 0 else (os.cpu_count() or 1)
    if workers > 1 and len(chunks) > 1:
        # each task runs in a copy of the caller's context so context-scoped settings reach the workers
        ctxs = [contextvars.copy_context() for _ in chunks]
        with ThreadPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
            parts = list(pool.map(lambda ctx, rows: ctx.run(integrals, rows), ctxs, chunks))
    else:
        parts = [integrals(c) for c in chunks]
    base = pref * np.concatenate([p[0] for p in parts])
    fine = pref * np.concatenate([p[1] for p in parts])

    if np.any(~np.isfinite(base)) or np.any(base < 0):
        bad = x[~np.isfinite(base) | (base < 0)]
        raise ConsistencyError(f"negative or non-finite spectral density at x = {bad[:10].tolist()}")
    if quad.check and base.size:
        peak = float(np.max(np.abs(fine)))
        tol = quad.rtol * (np.abs(fine) + 1e-6 * peak)
        bad = np.abs(base - fine) > tol
        if bad.any():
            raise QuadratureError(
                f"panel halving changed {int(bad.sum())} point(s) beyond tolerance",
                points=x[bad].tolist(),
            )
    return SpectrumTable(kernel, x, base, media, scenario, a_factor)


def infinite_table(media: Media, scenario: Scenario, x_grid) -> SpectrumTable:
    """``spectrum_infinite`` sampled on ``x_grid`` as a table."""
    x = np.asarray(x_grid, dtype=float)
    return SpectrumTable("infinite", x, spectrum_infinite(media, scenario, x), media, scenario)


def _budget(media: Media, scenario: Scenario, n: float, e_hck: float) -> PhotonBudget:
    unit = hbar_c_k_ev(scenario)
    e_ev = e_hck * unit
    return PhotonBudget(
        n_total=n,
        e_total_hck=e_hck,
        e_total_ev=e_ev,
        e_avg_ev=e_ev / n if n > 0 else 0.0,
        hbar_c_k_ev=unit,
    )


def photon_budget_infinite(media: Media, scenario: Scenario) -> PhotonBudget:
    """Closed-form photon number and energy of the infinite-volume spectrum."""
    ng, nl = media.n_gas, media.n_liquid
    rk3 = scenario.x_max**3
    c = _contrast(media)
    n = c * rk3 / (6.0 * math.pi * nl * ng)
    e = c * rk3 / (8.0 * math.pi * nl * nl * ng)
    return _budget(media, scenario, n, e)


def photon_budget_from_table(table: SpectrumTable, media: Media | None = None,
                             scenario: Scenario | None = None) -> PhotonBudget:
    """Trapezoidal photon number and energy of a tabulated spectrum.

    Warns with :class:`CoverageWarning` when the last sample still exceeds
    ``1e-6`` of the peak (an infinite-mode table reaching ``R K`` is complete).
    """
    media = media or table.media
    scenario = scenario or table.scenario
    x, d = table.x, table.dndx
    if x.size < 2 or not np.any(d > 0):
        return _budget(media, scenario, 0.0, 0.0)
    complete = table.mode == "infinite" and x[-1] >= scenario.x_max
    if not complete and d[-1] > 1e-6 * d.max():
        warnings.warn(
            f"spectrum still at {d[-1] / d.max():.3g} of its peak at x = {x[-1]:.6g}",
            CoverageWarning,
            stacklevel=2,
        )
    n = float(np.trapezoid(d, x))
    e = float(np.trapezoid(x * d, x)) / (media.n_liquid * scenario.x_max)
    return _budget(media, scenario, n, e)


def schwinger_static_energy(media: Media, scenario: Scenario) -> StaticEnergy:
    """Bulk static Casimir energy ``(R K)**3 (1/n_g - 1/n_l) / (6 pi)`` in units of ``hbar c K``."""
    ng, nl = media.n_gas, media.n_liquid
    e = scenario.x_max**3 * (1.0 / ng - 1.0 / nl) / (6.0 * math.pi)
    if ng == nl:
        e = 0.0
    return StaticEnergy(e_hck=e, e_ev=e * hbar_c_k_ev(scenario), n_est=e / (0.75 / nl))
