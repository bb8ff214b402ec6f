"""Adaptive interior-penalty dG solver for unsteady convection-diffusion-reaction."""

from ._core import (
    AdaptConfig,
    AdaptResult,
    ConvergenceRow,
    DGCDError,
    Problem,
    RunConfig,
    SolverError,
    StationaryRow,
    StepRecord,
    config_keys,
    convergence_csv,
    convergence_study,
    gauss_legendre,
    make_problem,
    parse_config,
    run,
    stationary_study,
)

__all__ = [
    "AdaptConfig",
    "AdaptResult",
    "ConvergenceRow",
    "DGCDError",
    "Problem",
    "RunConfig",
    "SolverError",
    "StationaryRow",
    "StepRecord",
    "config_keys",
    "convergence_csv",
    "convergence_study",
    "gauss_legendre",
    "make_problem",
    "parse_config",
    "run",
    "stationary_study",
]
