"""Domain models for Kansa collocation runs"""
from .records import (
    STATUS_CONFIG_ERROR,
    STATUS_ERROR,
    STATUS_OK,
    STATUS_SINGULAR,
    ConvergenceRow,
    FarfieldRow,
    McSummary,
    SearchResult,
    TrialRecord,
)
from .system import Coefficients, KansaSystem, SolveReport

__all__ = [
    "STATUS_CONFIG_ERROR",
    "STATUS_ERROR",
    "STATUS_OK",
    "STATUS_SINGULAR",
    "Coefficients",
    "ConvergenceRow",
    "FarfieldRow",
    "KansaSystem",
    "McSummary",
    "SearchResult",
    "SolveReport",
    "TrialRecord",
]
