"""Radial steady states and long-time behaviour for a viscous Hamilton-Jacobi
equation with p-Laplacian diffusion in the unit ball."""
from .params import (DerivedConstants, ParameterError, ProblemParams, chi, derive_constants,
                     p_laplace_residual_radial, stationary_residual_radial)
from .steady import SteadyState, max_value, theta_from_max
from .solver import (BlowUpError, RadialField, RadialGrid, RegularizedCoefficients, StabilityError,
                     Trajectory, grid_epsilon, solve, step)
from .envelopes import Barrier, GradientEnvelope, a_priori_A0, lambda_m
from .diagnostics import (Check, ConvergenceReport, check_flux_monotone, check_scaled_derivative_monotone,
                          convergence_report, profile_diagnostics)
from .config import RunConfig, SweepSpec, load_config, parse_config, serialize_config

__all__ = [
    "Barrier", "BlowUpError", "Check", "ConvergenceReport", "DerivedConstants", "GradientEnvelope",
    "ParameterError", "ProblemParams", "RadialField", "RadialGrid", "RegularizedCoefficients",
    "RunConfig", "StabilityError", "SteadyState", "SweepSpec", "Trajectory", "a_priori_A0",
    "check_flux_monotone", "check_scaled_derivative_monotone", "chi", "convergence_report",
    "derive_constants", "grid_epsilon", "lambda_m", "load_config", "max_value",
    "p_laplace_residual_radial", "parse_config", "profile_diagnostics", "serialize_config", "solve",
    "stationary_residual_radial", "step", "theta_from_max",
]
