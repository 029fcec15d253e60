"""Per-matrix singularity diagnostics and the trial runner shared by all experiments"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import numpy as np

from kansa_collocation.exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    DomainError,
    DuplicatePointError,
    KansaError,
)
from kansa_collocation.geometry import CollocationSet, min_separation
from kansa_collocation.linalg import det_sign_logabs, singularity_threshold, svd_extremes
from kansa_collocation.models import STATUS_CONFIG_ERROR, STATUS_ERROR, TrialRecord

logger = logging.getLogger(__name__)

NEAR_SINGULAR_RATIO = 1e-8

# Invalid point sets, as opposed to failures of the numerics
CONFIGURATION_ERRORS = (DuplicatePointError, DimensionMismatchError, DomainError, ConfigurationError)

T = TypeVar("T")
R = TypeVar("R")


def diagnose(matrix: np.ndarray, colloc: CollocationSet, trial_index: int, seed: int) -> TrialRecord:
    sigma_min, sigma_max = svd_extremes(matrix)
    det_sign, log_abs_det = det_sign_logabs(matrix)
    singular = sigma_min <= singularity_threshold(colloc.size, sigma_max)
    record = TrialRecord(
        trial_index=trial_index,
        seed=seed,
        n=colloc.n,
        m=colloc.m,
        sigma_min=sigma_min,
        sigma_max=sigma_max,
        cond2=sigma_max / sigma_min if sigma_min > 0.0 else float("inf"),
        det_sign=det_sign,
        log_abs_det=log_abs_det,
        min_separation=min_separation(colloc.points) if colloc.size >= 2 else float("nan"),
        singular_flag=bool(singular),
        points=colloc.points,
    )
    record.near_singular = bool(record.ratio < NEAR_SINGULAR_RATIO)
    if singular:
        logger.warning(
            "trial %d (seed %d) is numerically singular: sigma_min=%.3e sigma_max=%.3e",
            trial_index, seed, sigma_min, sigma_max,
        )
    return record


def guarded_trial(
    trial_index: int, seed: int, n: int, m: int, build: Callable[[], TrialRecord]
) -> TrialRecord:
    """Run one trial, turning library errors into a failed record"""
    try:
        return build()
    except CONFIGURATION_ERRORS as e:
        logger.info("trial %d rejected: %s", trial_index, e)
        return TrialRecord.failed(trial_index, seed, n, m, STATUS_CONFIG_ERROR, e)
    except KansaError as e:
        logger.error("trial %d failed: %s", trial_index, e)
        return TrialRecord.failed(trial_index, seed, n, m, STATUS_ERROR, e)


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        return os.cpu_count() or 1
    if threads < 1:
        raise ConfigurationError(f"threads must be at least 1, got {threads}")
    return threads


def run_parallel(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Map fn over items on a thread pool; results keep the order of items"""
    items = list(items)
    workers = min(resolve_threads(threads), max(1, len(items)))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
