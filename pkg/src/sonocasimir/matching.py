"""Matching of the bubble-present ("in") radial modes at the bubble wall.

Lengths are measured in units of the bubble radius, ``u = r / R``. An in-mode
with interior argument ``y = n_gas * omega * R / c`` is

    A J_nu(y u)                     for u <= 1
    B J_nu(w u) + C N_nu(w u)       for u >  1,     w = (n_liquid / n_gas) y

and continuity of the mode and its derivative at ``u = 1`` fixes B and C in
terms of A. The overall scale comes from ``B**2 + C**2 = 1``. Using the
Wronskian ``J N' - N J' = 2 / (pi z)`` of the exterior pair the solution is

    B = A * b,  C = A * c,  A = 1 / hypot(b, c),

    b = (pi/2) [y J_{nu+1}(y) N_nu(w) - w J_nu(y) N_{nu+1}(w)]
    c = (pi/2) [w J_nu(y) J_{nu+1}(w) - y J_{nu+1}(y) J_nu(w)]
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import _checked_argument, _checked_lmax, _j_half, _n_half, _order, _scalar


@dataclass(frozen=True)
class Media:
    """Refractive indices inside (gas) and outside (liquid) the bubble."""

    n_gas: float
    n_liquid: float

    def __post_init__(self):
        for name in ("n_gas", "n_liquid"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and positive, got {v!r}")
            object.__setattr__(self, name, float(v))

    @property
    def eps_inside(self) -> float:
        return self.n_gas**2

    @property
    def eps_outside(self) -> float:
        return self.n_liquid**2

    @property
    def ratio(self) -> float:
        """``n_liquid / n_gas``: maps the interior argument onto the exterior one."""
        return self.n_liquid / self.n_gas


@dataclass(frozen=True)
class MatchingCoefficients:
    a: float
    b: float
    c: float
    suppressed: bool = False


def wall_amplitudes(media: Media, lmax: int, y):
    """Tables of the reduced amplitudes ``b`` and ``c`` for ``l = 0..lmax``.

    Shape ``(lmax + 1,) + y.shape``. ``hypot(b, c)`` is ``1 / A``; where it is
    zero or not finite the mode is too deep in the large-order regime to matter.
    """
    y = np.asarray(y, dtype=float)
    w = media.ratio * y
    jy = _j_half(lmax + 1, y)
    jw = _j_half(lmax + 1, w)
    nw = _n_half(lmax + 1, w)
    half_pi = 0.5 * np.pi
    with np.errstate(all="ignore"):
        b = half_pi * (y * jy[1:] * nw[:-1] - w * jy[:-1] * nw[1:])
        c = half_pi * (w * jy[:-1] * jw[1:] - y * jy[1:] * jw[:-1])
    return b, c


def inverse_amplitude_table(media: Media, lmax: int, y):
    """``1 / A`` for ``l = 0..lmax``; ``nan`` marks suppressed modes."""
    b, c = wall_amplitudes(media, lmax, y)
    with np.errstate(all="ignore"):
        s = np.hypot(b, c)
    s[~np.isfinite(s) | (s == 0)] = np.nan
    return s


def a_squared(media: Media, m, y):
    """Exact ``|A_nu(y)|**2``, vectorised over ``y``; suppressed modes give 0."""
    l = _checked_lmax(_order(m))
    y = _checked_argument(y, "y")
    s = inverse_amplitude_table(media, l, y)[l]
    out = np.where(np.isnan(s), 0.0, 1.0 / np.where(np.isnan(s), 1.0, s) ** 2)
    return _scalar(out)


def matching_coefficients(media: Media, m, y: float) -> MatchingCoefficients:
    """Wall amplitudes ``A > 0``, ``B``, ``C`` for one mode.

    Returns ``A = 0, B = 1, C = 0`` flagged ``suppressed`` when the
    determinants underflow (``l`` far above ``y``).
    """
    l = _checked_lmax(_order(m))
    y = float(_checked_argument(y, "y"))
    b, c = wall_amplitudes(media, l, y)
    b, c = float(b[l]), float(c[l])
    s = math.hypot(b, c) if math.isfinite(b) and math.isfinite(c) else math.nan
    if not math.isfinite(s) or s == 0.0:
        return MatchingCoefficients(0.0, 1.0, 0.0, suppressed=True)
    return MatchingCoefficients(1.0 / s, b / s, c / s)


def a_squared_asymptotic(media: Media, m, y):
    """Large-``y`` form of ``|A|**2``; its average over one period in ``y`` is 1."""
    nu = _order(m) + 0.5
    y = _checked_argument(y, "y")
    ng, nl = media.n_gas, media.n_liquid
    phase = 2.0 * y - (nu + 0.5) * np.pi
    return _scalar(2 * ng * nl / (ng**2 + nl**2 + (nl**2 - ng**2) * np.cos(phase)))


def _unit_interval(u):
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)) or np.any(u < 0):
        raise DomainError("u = r/R must be finite and non-negative")
    return u


def radial_mode_in(media: Media, m, y: float, u):
    """In-mode profile at ``u = r/R``: interior ``A J(y u)``, exterior ``B J(w u) + C N(w u)``."""
    l = _checked_lmax(_order(m))
    u = _unit_interval(u)
    coef = matching_coefficients(media, l, y)
    w = media.ratio * y
    out = np.zeros(u.shape)
    inside = (u > 0) & (u <= 1)
    outside = u > 1
    if inside.any():
        out[inside] = coef.a * _j_half(l, y * u[inside])[l]
    if outside.any():
        z = w * u[outside]
        with np.errstate(invalid="ignore"):
            tail = coef.b * _j_half(l, z)[l]
            if coef.c != 0.0:
                tail = tail + coef.c * _n_half(l, z)[l]
        out[outside] = tail
    return _scalar(out)


def radial_mode_out(m, x: float, u):
    """Out-mode profile ``J_nu(x u)`` in the homogeneous liquid."""
    l = _checked_lmax(_order(m))
    x = float(_checked_argument(x, "x"))
    u = _unit_interval(u)
    out = np.zeros(u.shape)
    pos = u > 0
    if pos.any():
        out[pos] = _j_half(l, x * u[pos])[l]
    return _scalar(out)
