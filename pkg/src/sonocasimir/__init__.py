"""Photon production by a suddenly collapsing dielectric bubble.

Bogolubov coefficients between the bubble-present and homogeneous mode
bases, the resulting photon spectra and budgets, and the static Casimir
energy they are compared with.
"""
__version__ = "0.1.0"

from .approx import ApproximationReport, GridSpec, approximation_report, d_approx, d_exact, f_factorized, sinc_kernel
from .bogolubov import (
    Scenario,
    TruncationPolicy,
    beta_squared,
    f_exact,
    l_max_physical,
    overlap_identity_check,
    overlap_integral_closed,
)
from .errors import CasimirError, ConsistencyError, DomainError, QuadratureError, RangeError, TruncationError
from .matching import Media, MatchingCoefficients, a_squared, a_squared_asymptotic, matching_coefficients
from .specfun import ModeIndex, bessel_j_half, bessel_j_large_order, bessel_n_half, pseudo_wronskian, pseudo_wronskian_diagonal
from .spectra import (
    PhotonBudget,
    QuadSpec,
    SpectrumTable,
    StaticEnergy,
    photon_budget_from_table,
    photon_budget_infinite,
    schwinger_static_energy,
    spectrum_finite,
    spectrum_infinite,
)
