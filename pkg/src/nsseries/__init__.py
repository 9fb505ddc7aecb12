"""Fourier-space series solver for small-data incompressible Navier-Stokes.

The library discretizes frequency space on a truncated cubic lattice,
builds the solution as a Catalan-indexed series of iterated heat products,
verifies the inequalities the construction rests on, and cross-checks the
result against an independent exponential Runge-Kutta integrator.
"""

__version__ = "0.1.0"

from .grid import FrequencyGrid, build_grid, OUT_OF_RANGE
from .fields import (SpectralField, TimeGrid, SpectralTrajectory,
                     gaussian_initial_data, random_smooth_field,
                     weighted_norm_1p2, norm_1p2, trajectory_norm_1p2_sup,
                     seminorm_pn, apply_S_alpha, smallness_ratio,
                     divergence_error, save_field, load_field,
                     DEFAULT_RIESZ_CONSTANT)
from .convolve import (convolve_scalar, tensor_convolve, riesz_convolve,
                       MonomialTree, monomial_eval, all_bracketings,
                       calibrate_riesz_constant)
from .heatprod import (leray_projector, duhamel_weights, odot_product,
                       odot_time_derivative, CaloricEnvelope)
from .series import (SeriesExpansion, build_v0, recurse_terms,
                     envelope_profile, catalan_envelope_rhs,
                     truncation_order, sum_series, fixed_point_residual,
                     DivergencePredicted)
from .assemble import (PhysicalSample, pressure_symbol, momentum_residual,
                       reconstruct_physical, energy)
from .integrator import (step_integrating_factor, run_oracle,
                         compare_trajectories, BlowUpError)
from .extension import (laplace_fourier_eval, growth_order_estimate,
                        auto_growth_radii)
from .experiment import (ExperimentConfig, ExperimentReport, load_config,
                         serialize_config, run_experiment, emit_report)
from .scalar_bounds import (PowerSplitConstants, power_split_constants,
                            conjugate_exponent, catalan_sequence, r_alpha,
                            polyalpha_max, inner_split_max,
                            powerlinear_expand, run_inequality_checks)
