"""
Graded SPDE SDK: Exponential Euler Solvers for the Stochastic Heat Equation

This package solves du + Au dt = f(u) dt + dW on (0,1) with Dirichlet boundary
conditions and additive Q-Wiener noise, using a modified exponential Euler
scheme on graded time meshes with sine-collocation or spectral Galerkin
spatial discretization. It ships a Monte Carlo harness for strong convergence
studies and closed-form diagnostics of the noise regularity.

Core Modules:
    - spectral_core: Sine basis, Sobolev and Besov norms, DST-I transforms, filters
    - time_mesh: Graded meshes and the admissible grading exponent
    - noise_spectra: Noise spectra and their regularity classification
    - increment_stream: Counter-addressed Gaussian draws
    - noise_engine: Exact increments, aggregation and closed-form noise series
    - solver: The exponential Euler stepper and the linear oracle
    - diagnostics: Noise-bound, regularity and inverse-inequality audits
    - config: Experiment configuration
    - harness: Convergence studies and report emission
    - report_codec / field_store / run_ledger: Persistence

Author: graded-spde-sdk developers
Version: 1.0.0
License: MIT
"""

__version__ = "1.0.0"
__author__ = "graded-spde-sdk developers"

from .errors import SpdeError, DomainError, ValidationError, NumericError, ReportError
from .spectral_core import (
    SpectralField,
    HsNorm,
    EnsembleField,
    eigenvalue,
    sobolev_norm,
    dyadic_block,
    besov_norm_ensemble,
    project_truncate,
    sine_interpolate,
    evaluate_on_grid,
    constant_one_projection,
    collocation_nonlinearity,
    galerkin_nonlinearity,
    semigroup_apply,
    phi_filter_apply,
)
from .time_mesh import GradedMesh, graded_mesh, verify_grading, gamma_lower_bound
from .noise_spectra import NoiseSpectrum, WhiteNoise, PowerNoise, TraceClassNoise, parse_spectrum
from .increment_stream import increment_entry
from .noise_engine import (
    IncrementPack,
    sample_increments,
    convolution_increment,
    aggregate_increments,
    convolution_l2_sq_exact,
    besov_block_bound_exact,
    increment_scaling_exact,
    sobolev_series_partial,
)
from .solver import (
    Drift,
    SchemeConfig,
    Trajectory,
    register_drift,
    parse_datum,
    initial_state,
    first_step,
    step,
    solve_path,
    linear_oracle,
)
from .diagnostics import (
    DiagnosticReport,
    verify_assumption3,
    sharpness_probe,
    empirical_regularity,
    inverse_inequality_check,
    besov_sobolev_contrast,
    ito_isometry_check,
    stability_profile,
)
from .config import ExperimentConfig, load_config
from .error_table import ErrorTable, estimate_order
from .report_codec import ErrorTableEncoder, ErrorTableDecoder, ErrorTableCodec
from .run_ledger import RunLedger, LedgerEntry
from .harness import (
    run_spatial_convergence,
    run_temporal_convergence,
    sample_ensemble,
    solve_single,
    dump_mesh,
    emit_report,
)

__all__ = [
    "SpdeError",
    "DomainError",
    "ValidationError",
    "NumericError",
    "ReportError",
    "SpectralField",
    "HsNorm",
    "EnsembleField",
    "eigenvalue",
    "sobolev_norm",
    "dyadic_block",
    "besov_norm_ensemble",
    "project_truncate",
    "sine_interpolate",
    "evaluate_on_grid",
    "constant_one_projection",
    "collocation_nonlinearity",
    "galerkin_nonlinearity",
    "semigroup_apply",
    "phi_filter_apply",
    "GradedMesh",
    "graded_mesh",
    "verify_grading",
    "gamma_lower_bound",
    "NoiseSpectrum",
    "WhiteNoise",
    "PowerNoise",
    "TraceClassNoise",
    "parse_spectrum",
    "increment_entry",
    "IncrementPack",
    "sample_increments",
    "convolution_increment",
    "aggregate_increments",
    "convolution_l2_sq_exact",
    "besov_block_bound_exact",
    "increment_scaling_exact",
    "sobolev_series_partial",
    "Drift",
    "SchemeConfig",
    "Trajectory",
    "register_drift",
    "parse_datum",
    "initial_state",
    "first_step",
    "step",
    "solve_path",
    "linear_oracle",
    "DiagnosticReport",
    "verify_assumption3",
    "sharpness_probe",
    "empirical_regularity",
    "inverse_inequality_check",
    "besov_sobolev_contrast",
    "ito_isometry_check",
    "stability_profile",
    "ExperimentConfig",
    "load_config",
    "ErrorTable",
    "estimate_order",
    "ErrorTableEncoder",
    "ErrorTableDecoder",
    "ErrorTableCodec",
    "RunLedger",
    "LedgerEntry",
    "run_spatial_convergence",
    "run_temporal_convergence",
    "sample_ensemble",
    "solve_single",
    "dump_mesh",
    "emit_report",
]
