"""Admissible initial data for spherically symmetric perfect fluids with p = k^2 rho."""

__version__ = "0.1.0"

from .ef_frame import EfStaticFields, static_constraint_residual, to_ef
from .initial_data import (
    InitialDataSet,
    Perturbation,
    TheoremReport,
    build_initial_data,
    check_no_trapped,
    compute_av,
    critical_h,
    theorem_constants,
    verify_theorem,
)
from .model import FluidModel, RadialGrid, StaticProfile, deficit_angle
from .oracle import singular_density_coefficient
from .scaling import fit_c2_c3
from .static_star import AsymptoticsReport, StaticSolveError, fit_asymptotics, solve_static

__all__ = [
    "AsymptoticsReport",
    "EfStaticFields",
    "FluidModel",
    "InitialDataSet",
    "Perturbation",
    "RadialGrid",
    "StaticProfile",
    "StaticSolveError",
    "TheoremReport",
    "build_initial_data",
    "check_no_trapped",
    "compute_av",
    "critical_h",
    "deficit_angle",
    "fit_asymptotics",
    "fit_c2_c3",
    "singular_density_coefficient",
    "solve_static",
    "static_constraint_residual",
    "theorem_constants",
    "to_ef",
    "verify_theorem",
]
