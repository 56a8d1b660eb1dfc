"""Fractional powers of the 2-D Dirichlet Laplacian via rational approximation,
with splitting schemes for fractional diffusion."""

from .experiments import (ExperimentSpec, OrderEstimate, ResultTable, estimate_order,
                          run_convergence_order, run_evolution, run_scalar_profile,
                          run_stationary_table)
from .grid import (GridFunction, GridMismatchError, GridSpec, delta_lower_bound, inner_product,
                   norm_l2, norm_linf, read_csv, sample, write_csv)
from .laplacian import (ConvergenceError, ShiftedSolveConfig, apply_A, assemble_A, lambda_max,
                        solve_shifted)
from .rational import (QuadratureError, RationalCoefficients, apply_Rm, gauss_jacobi_coeffs,
                       gauss_jacobi_rule, make_coeffs, read_coeffs_csv, scalar_error_profile,
                       simpson_coeffs, write_coeffs_csv)
from .spectral import (EigenBasis, apply_power, eigenbasis, evolve_exact, evolve_rational,
                       explicit_step, explicit_step_bound, weighted_step)
from .splitting import (MassOperator, SchemeConfig, Trajectory, build_D_terms, evolve,
                        regularized_step, split_step_componentwise, split_step_mass)

__version__ = "0.1.0"
