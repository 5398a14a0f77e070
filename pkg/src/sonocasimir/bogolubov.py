r"""Partial-wave Bogolubov kernel and the squared Bogolubov coefficient.

With ``x = n_liquid omega_out R / c`` and ``y = n_gas omega_in R / c`` the
kernel is

.. math::

    F(x, y) = \sum_{l \ge 1} (2l+1)\, w_l(y)\,
              \frac{\tilde W_\nu(x, y)^2}{(x^2 - y^2)^2}

where :math:`w_l = 1` (``a_factor="unit"``) or :math:`w_l = |A_\nu(y)|^2`
(``a_factor="exact"``). Near ``x == y`` each ratio is replaced by its limit, which up to sign is
``pseudo_wronskian_diagonal((x+y)/2) / (x + y)``.

Truncation uses the bound

.. math::

    \left|\frac{\tilde W_\nu(x,y)}{x^2-y^2}\right|
      = \left|\int_0^1 u J_\nu(xu) J_\nu(yu)\,du\right|
      \le \frac{B_\nu(x) B_\nu(y)}{2(\nu+1)},
    \qquad B_\nu(z) = \frac{(ez/2\nu)^\nu}{\sqrt{2\pi\nu}} \ge |J_\nu(z)|,

so the adaptive rule stops a point once the bounded tail is below
``tail_epsilon`` times the partial sum. Each point stops on its own, so a
value never depends on which other points were evaluated with it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureError, TruncationError
from .matching import Media, inverse_amplitude_table, matching_coefficients
from .specfun import (
    MAX_ORDER,
    _checked_argument,
    _j_half,
    _order,
    _scalar,
    log_j_bound,
    pseudo_wronskian,
    pseudo_wronskian_diagonal,
)

SPEED_OF_LIGHT = 299_792_458.0  # m/s

DIAGONAL_REL = 1e-6
MIN_MARGIN = 10
A_FACTORS = ("unit", "exact")


@dataclass(frozen=True)
class Scenario:
    """Bubble radius ``radius`` [m] and wavenumber cutoff ``cutoff`` [rad/m]."""

    radius: float
    cutoff: float

    def __post_init__(self):
        for name in ("radius", "cutoff"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and positive, got {v!r}")
            object.__setattr__(self, name, float(v))

    @classmethod
    def from_units(cls, radius_um: float, cutoff_nm: float) -> "Scenario":
        """Build from a radius in micrometres and a cutoff wavelength in nanometres."""
        return cls(radius_um * 1e-6, 2.0 * math.pi / (cutoff_nm * 1e-9))

    @property
    def x_max(self) -> float:
        """Dimensionless cutoff ``R K``."""
        return self.radius * self.cutoff

    @property
    def radius_um(self) -> float:
        return self.radius * 1e6

    @property
    def cutoff_nm(self) -> float:
        return 2.0 * math.pi / self.cutoff * 1e9


@dataclass(frozen=True)
class TruncationPolicy:
    rule: str = "adaptive"
    fixed_l_max: int | None = None
    tail_epsilon: float = 1e-8
    l_min: int = 1

    def __post_init__(self):
        if self.rule not in ("adaptive", "fixed"):
            raise DomainError(f"unknown truncation rule {self.rule!r}")
        if not (0 < self.tail_epsilon <= 1e-3):
            raise DomainError("tail_epsilon must lie in (0, 1e-3]")
        if self.rule == "fixed" and (self.fixed_l_max is None or self.fixed_l_max < 1):
            raise DomainError("a fixed rule needs fixed_l_max >= 1")
        if self.l_min != 1:
            raise DomainError("partial-wave sums always start at l = 1")


DEFAULT_POLICY = TruncationPolicy()


def l_max_physical(scenario: Scenario) -> int:
    """Largest angular momentum a photon at the cutoff can carry, ``floor(R K)``."""
    return math.floor(scenario.x_max)


def _tail_log_terms(l, x, y):
    # log of the bound on term l at (x, y), with nu = l + 1/2
    nu = l + 0.5
    return (
        math.log(2 * l + 1)
        + 2.0 * (log_j_bound(nu, x) + log_j_bound(nu, y) - math.log(2.0 * (nu + 1.0)))
    )


def _tail_estimate(l, x, y):
    """Bound on the sum of all terms above ``l``; ``inf`` where it cannot be certified."""
    with np.errstate(all="ignore"):
        t1 = _tail_log_terms(l + 1, x, y)
        t2 = _tail_log_terms(l + 2, x, y)
        q = np.exp(t2 - t1)
        est = np.where(q < 0.5, np.exp(t1) / (1.0 - q), np.inf)
    return np.where(np.isneginf(t1), 0.0, est)


def l_cap(x_hi: float, y_hi: float, tail_epsilon: float) -> int:
    """Order up to which Bessel tables are built for an adaptive sum on ``[0, x_hi] x [0, y_hi]``.

    Far beyond any per-point stop; it only sizes the tables.
    """
    m = max(x_hi, y_hi, 1e-300)
    l = math.ceil(m) + MIN_MARGIN
    target = math.log(tail_epsilon) - 400.0
    while l < MAX_ORDER:
        if l + 1.5 > math.e * m / 2.0 and _tail_log_terms(l + 1, m, m) < target:
            break
        l += 1
    return min(l, MAX_ORDER)


def _kernel_sum(x, y, jx, jy, inv_amp, policy, lcap, yeff):
    """Core partial-wave sum on broadcast-compatible arrays (all entries > 0).

    ``jx``/``jy`` hold J tables for orders ``0..lcap+1``; ``inv_amp`` holds
    ``1/A`` for ``0..lcap`` (or ``None`` for unit weights). Returns the sum
    and the last order included at each point.
    """
    X, Y = np.broadcast_arrays(x, y)
    shape = X.shape
    diag = np.abs(X - Y) < DIAGONAL_REL * np.maximum(1.0, X)
    has_diag = bool(diag.any())
    with np.errstate(divide="ignore"):
        inv = np.where(diag, 0.0, 1.0 / np.where(diag, 1.0, (X - Y) * (X + Y)))
    if has_diag:
        mid = 0.5 * (X + Y)[diag]
        jm = _j_half(lcap, mid)
        diag_den = (X + Y)[diag]

    total = np.zeros(shape)
    last = np.zeros(shape, dtype=np.int64)
    active = np.ones(shape, dtype=bool)
    adaptive = policy.rule == "adaptive"
    if adaptive:
        floor = np.ceil(np.maximum(X, Y)) + MIN_MARGIN
        reach = np.e * np.maximum(X, yeff) / 2.0
        eps = policy.tail_epsilon

    ax, ay = None, None
    for l in range(1, lcap + 1):
        nu = l + 0.5
        ax = x * jx[l + 1]
        ay = y * jy[l + 1]
        q = (ax * jy[l] - jx[l] * ay) * inv
        if has_diag:
            q = np.array(np.broadcast_to(q, shape))
            j, jl = jm[l], jm[l - 1]
            q[diag] = -(2 * nu * j * jl - mid * (j * j + jl * jl)) / diag_den
        if inv_amp is not None:
            s = np.broadcast_to(inv_amp[l], shape)
            with np.errstate(invalid="ignore"):
                q = np.where(np.isnan(s), 0.0, q / np.where(np.isnan(s), 1.0, s))
        term = (2 * l + 1) * q * q
        total = np.where(active, total + term, total)
        last[active] = l
        if adaptive:
            ready = active & (l >= floor) & (nu + 1.0 > reach)
            if ready.any():
                est = _tail_estimate(l, X, yeff)
                done = ready & ((est <= eps * total) | (est < 1e-300))
                active &= ~done
                if not active.any():
                    break
    if adaptive and active.any():
        raise TruncationError(
            f"partial-wave sum not certified by l = {lcap} at {int(active.sum())} point(s)",
            mask=active,
        )
    return total, last


def _prepare(x, y, policy, media, a_factor, lcap=None):
    if a_factor not in A_FACTORS:
        raise DomainError(f"a_factor must be one of {A_FACTORS}, got {a_factor!r}")
    if a_factor == "exact" and media is None:
        raise DomainError("a_factor='exact' needs the media")
    policy = policy or DEFAULT_POLICY
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    gain = max(1.0, media.ratio) if a_factor == "exact" else 1.0
    x_hi = float(x.max()) if x.size else 0.0
    y_hi = float(y.max()) if y.size else 0.0
    if policy.rule == "fixed":
        if policy.fixed_l_max < max(x_hi, y_hi):
            raise TruncationError(
                f"fixed l_max = {policy.fixed_l_max} is below max(x, y) = {max(x_hi, y_hi):.6g}"
            )
        lcap = min(policy.fixed_l_max, MAX_ORDER)
    elif lcap is None:
        m = max(x_hi, gain * y_hi)
        # the stopping rule needs l >= ceil(m) + margin and l + 1.5 > e m / 2
        if max(math.ceil(m) + MIN_MARGIN, math.e * m / 2.0 - 1.5) > MAX_ORDER:
            raise TruncationError(
                f"argument {m:.6g} needs partial waves beyond l = {MAX_ORDER}"
            )
        lcap = l_cap(x_hi, gain * y_hi, policy.tail_epsilon)
    return x, y, policy, gain, lcap


def kernel_tables(values, lcap, media=None, a_factor="unit"):
    """J table (orders ``0..lcap+1``) and, for exact weights, the ``1/A`` table.

    Zeros are evaluated at 1 and must be masked by the caller.
    """
    v = np.where(np.asarray(values, dtype=float) > 0, values, 1.0)
    j = _j_half(lcap + 1, v)
    inv_amp = inverse_amplitude_table(media, lcap, v) if a_factor == "exact" else None
    return j, inv_amp


def kernel_block(x, y, jx, jy, inv_amp, policy, lcap, gain=1.0):
    """Kernel on broadcast-compatible ``x``/``y`` with precomputed tables; zeros give 0."""
    xs = np.where(x > 0, x, 1.0)
    ys = np.where(y > 0, y, 1.0)
    total, last = _kernel_sum(xs, ys, jx, jy, inv_amp, policy, lcap, gain * ys)
    zero = (np.broadcast_to(x, total.shape) <= 0) | (np.broadcast_to(y, total.shape) <= 0)
    total[zero] = 0.0
    last[zero] = 0
    return total, last


def _kernel(x, y, policy, media, a_factor, full_output=False):
    x, y, policy, gain, lcap = _prepare(x, y, policy, media, a_factor)
    jx, _ = kernel_tables(x, lcap)
    jy, inv_amp = kernel_tables(y, lcap, media, a_factor)
    total, last = kernel_block(x, y, jx, jy, inv_amp, policy, lcap, gain)
    if full_output:
        return _scalar(total), _scalar(last) if np.ndim(last) else int(last)
    return _scalar(total)


def f_exact(x, y, policy: TruncationPolicy | None = None, media: Media | None = None,
            a_factor: str = "unit", full_output: bool = False):
    """Truncated partial-wave kernel ``F(x, y)``.

    ``x`` and ``y`` broadcast against each other, so an outer grid is
    ``f_exact(x[:, None], y[None, :])``.

    Parameters
    ----------
    x, y : float or array_like
        Dimensionless out and in frequencies, strictly positive.
    policy : TruncationPolicy, optional
        Defaults to adaptive truncation with ``tail_epsilon = 1e-8``.
    media : Media, optional
        Needed only for ``a_factor="exact"``.
    a_factor : {"unit", "exact"}
        Weight each wave by 1 or by the exact ``|A_nu(y)|**2``.
    full_output : bool
        Also return the last angular momentum included at each point.
    """
    _checked_argument(x, "x")
    _checked_argument(y, "y")
    return _kernel(x, y, policy, media, a_factor, full_output)


def beta_prefactor(media: Media, x, y):
    """``(n_l^2 - n_g^2)^2 / (n_l^2 n_g^2) * (y^2 / (n_g x + n_l y))^2``."""
    ng, nl = media.n_gas, media.n_liquid
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    contrast = (nl * nl - ng * ng) ** 2 / (nl * nl * ng * ng)
    return contrast * (y * y / (ng * x + nl * y)) ** 2


def beta_squared(media: Media, scenario: Scenario, x, y,
                 policy: TruncationPolicy | None = None, a_factor: str = "unit"):
    """Squared Bogolubov coefficient in split form.

    Returns
    -------
    beta0_sq : float or ndarray
        Dimensionless ``beta_0^2(x, y)``.
    scale : float
        ``(R / c)**2`` in s^2; ``|beta|^2 = scale * beta0_sq``.
    """
    f = f_exact(x, y, policy, media, a_factor)
    scale = (scenario.radius / SPEED_OF_LIGHT) ** 2
    return _scalar(beta_prefactor(media, x, y) * f), scale


def overlap_integral_closed(media: Media, m, x: float, y: float) -> float:
    r"""Closed form of :math:`\int_0^\infty u\, G^{out}(xu)\, G^{in}(u)\, du`.

    Splitting at the wall and applying the pseudo-Wronskian identity on each
    side, the matching conditions collapse both boundary terms onto the
    interior determinant:

    .. math::

        A\,\tilde W_\nu(x, y)\left[\frac{1}{x^2-y^2} + \frac{1}{w^2-x^2}\right]
        = A\,\tilde W_\nu(x, y)\,\frac{w^2 - y^2}{(x^2-y^2)(w^2-x^2)},

    with ``w = (n_l/n_g) y``. The factor ``R**2`` is left out. ``x == y`` is
    removable; ``x == w`` is a genuine pole (continuum normalisation) and is
    rejected.
    """
    l = _order(m)
    x = float(_checked_argument(x, "x"))
    y = float(_checked_argument(y, "y"))
    w = media.ratio * y
    if media.n_gas == media.n_liquid:
        return 0.0
    if abs(x - w) <= DIAGONAL_REL * max(1.0, x):
        raise DomainError("overlap integral is singular at x = (n_liquid/n_gas) y")
    amp = matching_coefficients(media, l, y).a
    if abs(x - y) < DIAGONAL_REL * max(1.0, x):
        # W(x, y) / (x - y) tends to minus the diagonal form
        ratio = -pseudo_wronskian_diagonal(l, 0.5 * (x + y)) / (x + y)
    else:
        ratio = pseudo_wronskian(l, x, y) / ((x - y) * (x + y))
    return amp * ratio * (w * w - y * y) / (w * w - x * x)


GAUSS_ORDER = 16


def _composite_gauss(f, a, b, panels, order=GAUSS_ORDER):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    wts = (half[:, None] * weights[None, :]).ravel()
    return float(np.sum(wts * f(u)))


def overlap_identity_check(m, lam: float, mu: float, a: float, b: float,
                           rtol: float = 1e-14, max_panels: int = 1 << 14) -> float:
    r"""Relative residual of :math:`\int_a^b u J_\nu(\lambda u) J_\nu(\mu u)\,du = \left[\frac{\tilde W_\nu(\lambda u, \mu u)}{\lambda^2-\mu^2}\right]_a^b`.

    The left side is integrated with composite Gauss-Legendre panels doubled
    until two successive results agree; failure to agree raises
    :class:`QuadratureError`, distinct from a large residual.
    """
    l = _order(m)
    lam = float(_checked_argument(lam, "lambda"))
    mu = float(_checked_argument(mu, "mu"))
    if not (0 <= a < b) or not math.isfinite(b):
        raise DomainError("need 0 <= a < b < inf")
    if lam == mu:
        raise DomainError("lambda and mu must differ")

    def integrand(u):
        pos = np.where(u > 0, u, 1.0)
        return np.where(u > 0, u * _j_half(l, lam * pos)[l] * _j_half(l, mu * pos)[l], 0.0)

    def boundary(u):
        if u == 0:
            return 0.0
        return pseudo_wronskian(l, lam * u, mu * u)

    closed = (boundary(b) - boundary(a)) / ((lam - mu) * (lam + mu))

    panels = max(2, math.ceil((b - a) * max(lam, mu, 1.0) / 4.0))
    prev = _composite_gauss(integrand, a, b, panels)
    while True:
        panels *= 2
        if panels > max_panels:
            raise QuadratureError(
                f"quadrature did not converge for l={l}, lambda={lam}, mu={mu}, [{a}, {b}]"
            )
        cur = _composite_gauss(integrand, a, b, panels)
        scale = max(abs(cur), _composite_gauss(lambda u: np.abs(integrand(u)), a, b, panels))
        if abs(cur - prev) <= rtol * scale:
            break
        prev = cur
    return abs(cur - closed) / max(abs(closed), 1e-300)
