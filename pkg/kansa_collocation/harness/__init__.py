"""Experiment harness: Monte Carlo unisolvence, proof-structure checks, accuracy and search"""
from .accuracy import convergence_study, epsilon_sweep, median_rms
from .checks import interpolation_matrix_check, kernel_check, laplacian_fd_check
from .diagnostics import NEAR_SINGULAR_RATIO, diagnose, run_parallel
from .search import near_singular_search
from .unisolvence import (
    farfield_gaps_decrease,
    farfield_limit_check,
    incremental_growth,
    mc_unisolvence,
    relative_log_gap,
)

__all__ = [
    "NEAR_SINGULAR_RATIO",
    "convergence_study",
    "diagnose",
    "epsilon_sweep",
    "farfield_gaps_decrease",
    "farfield_limit_check",
    "incremental_growth",
    "interpolation_matrix_check",
    "kernel_check",
    "laplacian_fd_check",
    "mc_unisolvence",
    "median_rms",
    "near_singular_search",
    "relative_log_gap",
    "run_parallel",
]
