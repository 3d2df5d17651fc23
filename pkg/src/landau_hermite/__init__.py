"""Hermite spectral toolkit for the homogeneous Landau equation near equilibrium.

Maxwellian molecules only (collision kernel exponent gamma = 0). Velocity space
is discretized in the orthonormal Hermite-function basis whose ground state is
the square root of the standard Maxwellian; the near-equilibrium fluctuation is
advanced exactly through a ladder-operator calculus, and the results are checked
against an independent Gauss-Hermite quadrature oracle.
"""

from landau_hermite.basis import BasisTruncation, enumerate_basis
from landau_hermite.operators import (
    SparseOperator,
    build_harmonic,
    build_ladder,
    build_angular_momentum,
    build_laplace_beltrami,
    build_linearized_landau,
    kernel_basis,
)
from landau_hermite.moments import (
    GaussianComponent,
    GaussianMixtureSpec,
    MomentState,
    compute_alpha,
    normalize_distribution,
    diagonalize_second_moments,
    temperature_closed_form,
    extract_moments,
)
from landau_hermite.evolution import (
    IntegratorConfig,
    ReducedSystem,
    assemble_reduced_system,
    reduced_rhs,
    integrate,
    exact_semigroup,
)
from landau_hermite.diagnostics import (
    weighted_norm,
    gronwall_envelope,
    certify_run,
    fit_level_decay,
)
from landau_hermite.oracle import (
    QuadratureGrid,
    CollisionKernelSpec,
    hermite_transform,
    eval_collision_direct,
    eval_reduced_rhs_grid,
    compare_spectral_vs_direct,
)
from landau_hermite.config import ConfigError, RunConfig, load_config
from landau_hermite.verify import run_acceptance, run_suite

__version__ = "0.1.0"

__all__ = [
    "BasisTruncation",
    "enumerate_basis",
    "SparseOperator",
    "build_harmonic",
    "build_ladder",
    "build_angular_momentum",
    "build_laplace_beltrami",
    "build_linearized_landau",
    "kernel_basis",
    "GaussianComponent",
    "GaussianMixtureSpec",
    "MomentState",
    "compute_alpha",
    "normalize_distribution",
    "diagonalize_second_moments",
    "temperature_closed_form",
    "extract_moments",
    "IntegratorConfig",
    "ReducedSystem",
    "assemble_reduced_system",
    "reduced_rhs",
    "integrate",
    "exact_semigroup",
    "weighted_norm",
    "gronwall_envelope",
    "certify_run",
    "fit_level_decay",
    "QuadratureGrid",
    "CollisionKernelSpec",
    "hermite_transform",
    "eval_collision_direct",
    "eval_reduced_rhs_grid",
    "compare_spectral_vs_direct",
    "ConfigError",
    "RunConfig",
    "load_config",
    "run_acceptance",
    "run_suite",
]
