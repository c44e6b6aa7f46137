"""Desk-scale toolkit for moments of zeta'(rho) over Riemann zeta zeros.

Subpackages:
    sieve     -- arithmetic tables and weighted divisor sums
    zeta      -- theta, Hardy Z, and (zeta, zeta') evaluation
    zeros     -- zero location, import, and cache
    moments   -- J_k, sigma1/sigma2, Hoelder bound, fits, scans
    explicit  -- zero-power sums and the explicit-formula check
    cli       -- command-line pipelines
"""

__version__ = "0.1.0"

from .errors import (CacheInvalidError, EvaluationRangeError, InconsistentZeroError,
                     MissedZerosError, NumericalInconsistencyError, SieveSizeError,
                     ZeroImportError, ZetamomentsError)
from .sieve import (CoefficientVector, SieveTables, build_sieve, divisor_sum,
                    lambda2, lambda_star_log, tau_k, tau_k_truncated,
                    truncated_square_sum, write_coefficients_csv)
from .zeta import (CriticalLineValue, critical_line_value, hardy_z,
                   hardy_z_euler_maclaurin, hardy_z_riemann_siegel, theta,
                   zeta_and_derivative, zeta_prime_at_zero)
from .zeros import (ZeroSet, cache_load, cache_store, count_zeros_rvm, export_zeros,
                    find_zeros, import_zeros, load_or_compute)
from .moments import (MomentReport, compute_moment_report, default_xi, dirichlet_poly,
                      holder_lower_bound, large_value_scan, moment_jk, s11_divisor_sum,
                      scaling_fit, sigma1_direct, sigma2_diagonal, sigma2_direct,
                      sigma2_interchange_check, zeta_prime_profile)
from .explicit import (ExplicitFormulaReport, nearest_prime_power_distance,
                       verify_explicit_formula, zero_power_sum)

__all__ = [name for name in dir() if not name.startswith("_")]
