"""Solver and verification tools for -div(Du/|Du|) + |Du| = f with zero Dirichlet data."""

from .core import (CartesianGrid, ConfigurationError, Constant, DataError, DomainError, PowerLaw,
                   PreconditionError, RadialMesh, ScalarField, Tabulated, VectorField,
                   build_disk_grid, build_grid, build_radial_mesh, evaluate_datum, lp_norm,
                   tail, truncate)
from .exact import UNBOUNDED, build_exact, exact_residual, exact_u, exact_z, threshold_radius
from .solver import SolutionReport, SolverConfig, extract_vector_field, nonlinear_residual, picard_step, solve

__version__ = "0.1.0"
