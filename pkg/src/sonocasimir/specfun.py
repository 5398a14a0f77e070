r"""Bessel functions of half-integer order and the pseudo-Wronskians built on them.

Only orders :math:`\nu = l + 1/2` are needed, so everything is computed from the
spherical Bessel functions through

.. math::

    J_{l+1/2}(z) = \sqrt{2z/\pi}\, j_l(z), \qquad
    N_{l+1/2}(z) = \sqrt{2z/\pi}\, y_l(z).

:math:`j_l` is obtained by upward recurrence while :math:`l \le z` and by
Miller's downward recurrence (carried as ratios :math:`j_l/j_{l-1}` so that
nothing overflows) above that. :math:`y_l` is always recurred upward.

The ``*_table`` functions return all orders ``l = 0..lmax`` at once, with the
order on axis 0; the rest of the package works on these tables.
"""
from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RangeError

__all__ = [
    "MAX_ORDER",
    "MAX_ARGUMENT",
    "ModeIndex",
    "bessel_j_half",
    "bessel_n_half",
    "bessel_j_half_table",
    "bessel_n_half_table",
    "pseudo_wronskian",
    "pseudo_wronskian_diagonal",
    "bessel_j_large_order",
    "downward_start",
    "perturbed",
]

MAX_ORDER = 2000
MAX_ARGUMENT = 1.0e4

# Relative scale applied to every J value; only ever changed by ``perturbed``.
_j_scale = contextvars.ContextVar("sonocasimir_j_scale", default=1.0)


@dataclass(frozen=True)
class ModeIndex:
    """Angular momentum ``l`` of a partial wave, with Bessel order ``nu = l + 1/2``.

    Radiation sums run over ``l >= 1``; ``l = 0`` is accepted here so the
    half-integer Bessel functions can be evaluated at order 1/2 as well.
    """

    l: int

    def __post_init__(self):
        l = self.l
        if isinstance(l, bool) or not isinstance(l, (int, np.integer)):
            raise DomainError(f"angular momentum must be an integer, got {l!r}")
        if l < 0:
            raise DomainError(f"angular momentum must be non-negative, got {l}")
        object.__setattr__(self, "l", int(l))

    @property
    def nu(self) -> float:
        return self.l + 0.5


def _order(m) -> int:
    return m.l if isinstance(m, ModeIndex) else ModeIndex(m).l


@contextlib.contextmanager
def perturbed(rel: float):
    """Scale every J value by ``1 + rel`` inside the block (fault injection)."""
    token = _j_scale.set(1.0 + float(rel))
    try:
        yield
    finally:
        _j_scale.reset(token)


def downward_start(lmax: int) -> int:
    """Starting order of the downward recurrence when orders up to ``lmax`` are wanted."""
    return lmax + max(20, math.ceil(math.sqrt(40 * lmax)))


def _checked_argument(z, name="z"):
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError(f"{name} must be finite")
    if np.any(z <= 0):
        raise DomainError(f"{name} must be strictly positive")
    if np.any(z > MAX_ARGUMENT):
        raise RangeError(f"{name} exceeds the supported range (<= {MAX_ARGUMENT:g})")
    return z


def _checked_lmax(lmax):
    if lmax < 0:
        raise DomainError("lmax must be non-negative")
    if lmax > MAX_ORDER:
        raise RangeError(f"order {lmax} exceeds the supported range (<= {MAX_ORDER})")
    return int(lmax)


def _spherical_j(lmax, z):
    """Unchecked j_l(z) for l = 0..lmax; returns shape (lmax+1,) + z.shape."""
    z = np.asarray(z, dtype=float)
    shape = z.shape
    z = z.ravel()
    n = z.size
    out = np.zeros((lmax + 1, n))
    if n == 0:
        return out.reshape((lmax + 1,) + shape)
    with np.errstate(all="ignore"):
        s, c = np.sin(z), np.cos(z)
        out[0] = s / z
        # Highest order still reached reliably by upward recurrence.
        anchor = np.where(z < 1.0, 0, np.floor(z).astype(np.int64) + 1)
        anchor = np.minimum(anchor, lmax)
        top = int(anchor.max())
        if top >= 1:
            out[1] = (s / z - c) / z
            for l in range(1, top):
                out[l + 1] = (2 * l + 1) / z * out[l] - out[l - 1]
        low = int(anchor.min())
        if low < lmax:
            ratio = np.ones((lmax + 1, n))
            r = np.zeros(n)
            for l in range(downward_start(lmax), low, -1):
                r = z / ((2 * l + 1) - z * r)
                if l <= lmax:
                    ratio[l] = r
            orders = np.arange(lmax + 1)[:, None]
            below = orders <= anchor
            ratio[below] = 1.0
            base = out[anchor, np.arange(n)]
            out = np.where(below, out, base * np.cumprod(ratio, axis=0))
    return out.reshape((lmax + 1,) + shape)


def _spherical_y(lmax, z):
    """Unchecked y_l(z) for l = 0..lmax; overflow saturates at -inf."""
    z = np.asarray(z, dtype=float)
    shape = z.shape
    z = z.ravel()
    out = np.zeros((lmax + 1, z.size))
    with np.errstate(all="ignore"):
        s, c = np.sin(z), np.cos(z)
        out[0] = -c / z
        if lmax >= 1:
            out[1] = -(c / z + s) / z
        for l in range(1, lmax):
            out[l + 1] = (2 * l + 1) / z * out[l] - out[l - 1]
    blown = np.logical_or.accumulate(~np.isfinite(out), axis=0)
    out[blown] = -np.inf
    return out.reshape((lmax + 1,) + shape)


def _j_half(lmax, z):
    z = np.asarray(z, dtype=float)
    return np.sqrt(2.0 * z / np.pi) * _spherical_j(lmax, z) * _j_scale.get()


def _n_half(lmax, z):
    z = np.asarray(z, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        return np.sqrt(2.0 * z / np.pi) * _spherical_y(lmax, z)


def bessel_j_half_table(lmax: int, z) -> np.ndarray:
    """``J_{l+1/2}(z)`` for ``l = 0..lmax``, stacked along a new leading axis."""
    return _j_half(_checked_lmax(lmax), _checked_argument(z))


def bessel_n_half_table(lmax: int, z) -> np.ndarray:
    """``N_{l+1/2}(z)`` (Neumann / Bessel Y) for ``l = 0..lmax``; overflow gives ``-inf``."""
    return _n_half(_checked_lmax(lmax), _checked_argument(z))


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def bessel_j_half(m, z):
    """Bessel function of the first kind ``J_{l+1/2}(z)`` for ``z > 0``.

    Parameters
    ----------
    m : ModeIndex or int
        Angular momentum ``l``.
    z : float or array_like
        Argument, ``0 < z <= 1e4``.

    Returns
    -------
    float or ndarray
        Underflows to (signed) zero deep in the large-order regime.
    """
    l = _checked_lmax(_order(m))
    return _scalar(_j_half(l, _checked_argument(z))[l])


def bessel_n_half(m, z):
    """Bessel function of the second kind ``N_{l+1/2}(z)`` for ``z > 0``."""
    l = _checked_lmax(_order(m))
    return _scalar(_n_half(l, _checked_argument(z))[l])


def pseudo_wronskian(m, x, y):
    r"""Determinant :math:`J_\nu(x)\,yJ'_\nu(y) - J_\nu(y)\,xJ'_\nu(x)`.

    Evaluated through :math:`zJ'_\nu = \nu J_\nu - zJ_{\nu+1}`, which gives
    :math:`xJ_{\nu+1}(x)J_\nu(y) - yJ_{\nu+1}(y)J_\nu(x)` without any
    differentiation. Antisymmetric in ``x`` and ``y`` to the last bit.
    """
    l = _checked_lmax(_order(m))
    x = _checked_argument(x, "x")
    y = _checked_argument(y, "y")
    jx = _j_half(l + 1, x)
    jy = _j_half(l + 1, y)
    return _scalar((x * jx[l + 1]) * jy[l] - jx[l] * (y * jy[l + 1]))


def _lower_neighbour(l, x, table):
    # J_{nu-1}; for l = 0 this is J_{-1/2}(x) = sqrt(2/(pi x)) cos x
    if l >= 1:
        return table[l - 1]
    return np.sqrt(2.0 / (np.pi * x)) * np.cos(x) * _j_scale.get()


def pseudo_wronskian_diagonal(m, x):
    r"""Diagonal form of the pseudo-Wronskian,

    .. math:: 2\nu J_\nu(x) J_{\nu-1}(x) - x\,[J_\nu^2(x) + J_{\nu-1}^2(x)]

    which is the limit of ``pseudo_wronskian(m, x, y) / (y - x)`` as
    ``y -> x``. Note the order of the difference: divided by ``x - y`` the
    limit is the negative of this value. Only its square enters ``F``.
    """
    l = _checked_lmax(_order(m))
    x = _checked_argument(x, "x")
    table = _j_half(l, x)
    j = table[l]
    jm = _lower_neighbour(l, x, table)
    return _scalar((2 * l + 1) * j * jm - x * (j * j + jm * jm))


def log_j_bound(nu, z):
    """Log of ``(e z / 2 nu)**nu / sqrt(2 pi nu)``; ``-inf`` at ``z == 0``."""
    nu = np.asarray(nu, dtype=float)
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore"):
        return nu * np.log(np.e * z / (2.0 * nu)) - 0.5 * np.log(2.0 * np.pi * nu)


def bessel_j_large_order(m, z):
    """Large-order form ``(e z / 2 nu)**nu / sqrt(2 pi nu)`` of ``J_nu(z)``.

    Only meaningful, and only accepted, for ``nu > e z / 2``. It bounds
    ``|J_nu(z)|`` from above and is used for truncation estimates, never
    as a reported value.
    """
    nu = _order(m) + 0.5
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)) or np.any(z <= 0):
        raise DomainError("z must be finite and strictly positive")
    if np.any(nu <= np.e * z / 2.0):
        raise DomainError(f"large-order form needs nu > e*z/2 (nu={nu})")
    return _scalar(np.exp(log_j_bound(nu, z)))
