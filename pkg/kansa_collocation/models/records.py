"""Experiment records written one per CSV row"""
import math
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple

import numpy as np

STATUS_OK = "ok"
STATUS_CONFIG_ERROR = "config_error"
STATUS_ERROR = "error"
STATUS_SINGULAR = "singular"

NAN = float("nan")


@dataclass
class TrialRecord:
    """Singularity diagnostics of one assembled Kansa matrix"""
    COLUMNS: ClassVar[Tuple[str, ...]] = (
        "trial_index",
        "seed",
        "n",
        "m",
        "sigma_min",
        "sigma_max",
        "cond2",
        "det_sign",
        "log_abs_det",
        "min_separation",
        "singular_flag",
        "near_singular",
        "bordered_log_gap",
        "status",
        "error",
    )

    trial_index: int
    seed: int
    n: int
    m: int
    sigma_min: float = NAN
    sigma_max: float = NAN
    cond2: float = NAN
    det_sign: int = 0
    log_abs_det: float = NAN
    min_separation: float = NAN
    singular_flag: bool = False
    near_singular: bool = False
    bordered_log_gap: float = NAN
    status: str = STATUS_OK
    error: str = ""
    points: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    @property
    def ratio(self) -> float:
        """sigma_min / sigma_max, the scale-free distance to singularity"""
        if not self.sigma_max > 0.0:
            return NAN
        return self.sigma_min / self.sigma_max

    @classmethod
    def failed(cls, trial_index: int, seed: int, n: int, m: int, status: str, error: Exception) -> "TrialRecord":
        return cls(trial_index, seed, n, m, status=status, error=f"{type(error).__name__}: {error}")

    def to_row(self) -> List[Any]:
        return [getattr(self, name) for name in self.COLUMNS]

    def to_dict(self) -> Dict[str, Any]:
        return dict(zip(self.COLUMNS, self.to_row()))


@dataclass
class McSummary:
    trials: int
    failures: int
    min_sigma_min: float
    median_cond2: float
    worst_trial: Optional[TrialRecord]
    config_errors: int = 0
    errors: int = 0
    near_singular: int = 0

    @classmethod
    def from_records(cls, records: Sequence[TrialRecord]) -> "McSummary":
        ordered = sorted(records, key=lambda r: r.trial_index)
        ok = [r for r in ordered if r.ok]
        worst = min(ok, key=lambda r: (r.ratio, r.trial_index)) if ok else None
        return cls(
            trials=len(ordered),
            failures=sum(1 for r in ok if r.singular_flag),
            min_sigma_min=min((r.sigma_min for r in ok), default=NAN),
            median_cond2=float(np.median([r.cond2 for r in ok])) if ok else NAN,
            worst_trial=worst,
            config_errors=sum(1 for r in ordered if r.status == STATUS_CONFIG_ERROR),
            errors=sum(1 for r in ordered if r.status == STATUS_ERROR),
            near_singular=sum(1 for r in ok if r.near_singular),
        )

    def summary_line(self) -> str:
        return (
            f"trials={self.trials} failures={self.failures} "
            f"min_sigma_min={self.min_sigma_min:.6g} median_cond2={self.median_cond2:.6g}"
            + (f" config_errors={self.config_errors}" if self.config_errors else "")
            + (f" errors={self.errors}" if self.errors else "")
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trials": self.trials,
            "failures": self.failures,
            "near_singular": self.near_singular,
            "config_errors": self.config_errors,
            "errors": self.errors,
            "min_sigma_min": self.min_sigma_min,
            "median_cond2": self.median_cond2,
            "worst_trial": self.worst_trial.to_dict() if self.worst_trial else None,
        }


@dataclass
class ConvergenceRow:
    COLUMNS: ClassVar[Tuple[str, ...]] = (
        "N", "n", "m", "epsilon", "seed", "rms_error", "max_error", "cond2", "status", "reason",
    )

    N: int
    n: int
    m: int
    epsilon: float
    seed: int
    rms_error: float = NAN
    max_error: float = NAN
    cond2: float = NAN
    status: str = STATUS_OK
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def to_row(self) -> List[Any]:
        return [getattr(self, name) for name in self.COLUMNS]

    def to_dict(self) -> Dict[str, Any]:
        return dict(zip(self.COLUMNS, self.to_row()))


@dataclass
class FarfieldRow:
    """Bordered determinant with the candidate at distance R against its limit.

    ``radius`` is in units of 1/epsilon; ``distance`` is the absolute distance
    from the centroid.
    """
    COLUMNS: ClassVar[Tuple[str, ...]] = (
        "radius", "distance", "log_abs_det", "limit_log_abs_det", "relative_gap",
    )

    radius: float
    distance: float
    log_abs_det: float
    limit_log_abs_det: float
    relative_gap: float

    def to_row(self) -> List[Any]:
        return [getattr(self, name) for name in self.COLUMNS]

    def to_dict(self) -> Dict[str, Any]:
        return dict(zip(self.COLUMNS, self.to_row()))


@dataclass
class SearchResult:
    best: TrialRecord
    initial: TrialRecord
    interior: np.ndarray
    boundary: np.ndarray
    objective_history: List[float] = field(default_factory=list)
    accepted_steps: int = 0

    @property
    def objective(self) -> float:
        return self.best.ratio

    def to_dict(self) -> Dict[str, Any]:
        return {
            "objective": self.objective,
            "initial_objective": self.initial.ratio,
            "improved": not math.isclose(self.objective, self.initial.ratio),
            "accepted_steps": self.accepted_steps,
            "best": self.best.to_dict(),
            "initial": self.initial.to_dict(),
        }
