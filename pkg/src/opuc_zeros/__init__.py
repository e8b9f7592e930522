"""Expected real zeros of Gaussian random polynomials built from OPUC.

For a probability measure on the unit circle with real Verblunsky
coefficients, ``P_n = sum_i eta_i phi_i`` with i.i.d. standard normal
``eta_i`` has an expected number of real zeros ``E_n`` that grows like
``(2/pi) log(n+1) + A_0``.  The modules here compute ``E_n`` by quadrature,
check it by Monte Carlo root counting, and fit the large-``n`` expansion.
"""

from .expect import ExpectationResult, expect_half, expect_many, expect_total
from .fit import ExpansionFit, fit_expansion, ladder, universality_report
from .intensity import DensityGrid, density_grid, h_fun, rho_blaschke, rho_kernel
from .mc import McConfig, McStats, count_real_zeros, run_mc
from .measure import MeasureError, MeasureSpec, parse_measure, reflect, verblunsky
from .opuc import OpucBasis, blaschke, cd_kernels, monomial_coeffs
from .special import a0_constant, f_of_t, h_constant, universal_constants
from .szego import scattering_at, scattering_expansion, szego_from_weight

__version__ = "0.1.0"

__all__ = [
    "DensityGrid",
    "ExpansionFit",
    "ExpectationResult",
    "McConfig",
    "McStats",
    "MeasureError",
    "MeasureSpec",
    "OpucBasis",
    "a0_constant",
    "blaschke",
    "cd_kernels",
    "count_real_zeros",
    "density_grid",
    "expect_half",
    "expect_many",
    "expect_total",
    "f_of_t",
    "fit_expansion",
    "h_constant",
    "h_fun",
    "ladder",
    "monomial_coeffs",
    "parse_measure",
    "reflect",
    "rho_blaschke",
    "rho_kernel",
    "run_mc",
    "scattering_at",
    "scattering_expansion",
    "szego_from_weight",
    "universal_constants",
    "universality_report",
    "verblunsky",
]
