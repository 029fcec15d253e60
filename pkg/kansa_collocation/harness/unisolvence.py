"""Experiments on the nonsingularity of Kansa matrices with random interior points"""
import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from kansa_collocation.assembly import assemble_matrix, bordered_matrix
from kansa_collocation.exceptions import DomainError
from kansa_collocation.geometry import (
    BoundaryStrategy,
    CollocationSet,
    Density,
    Domain,
    sample_boundary,
    sample_interior,
)
from kansa_collocation.kernels import KernelSpec, ell0
from kansa_collocation.linalg import det_sign_logabs
from kansa_collocation.models import FarfieldRow, McSummary, TrialRecord

from .diagnostics import diagnose, guarded_trial, run_parallel

logger = logging.getLogger(__name__)

InteriorSampler = Callable[[Domain, Density, int, int], np.ndarray]


def mc_unisolvence(
    spec: KernelSpec,
    domain: Domain,
    density: Density,
    m: int,
    boundary_strategy: BoundaryStrategy,
    n: int,
    trials: int,
    seed0: int,
    threads: Optional[int] = None,
    interior_sampler: InteriorSampler = sample_interior,
) -> Tuple[McSummary, List[TrialRecord]]:
    """Assemble one Kansa matrix per trial from fresh interior points (seed seed0 + t).

    The boundary points are generated once and shared by every trial.
    """
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")
    boundary = sample_boundary(domain, m, boundary_strategy)
    logger.info("mc_unisolvence: %s, n=%d, m=%d, %d trials from seed %d", spec.label, n, m, trials, seed0)

    def run_trial(t: int) -> TrialRecord:
        seed = seed0 + t

        def build() -> TrialRecord:
            colloc = CollocationSet(interior_sampler(domain, density, n, seed), boundary)
            return diagnose(assemble_matrix(spec, colloc).matrix, colloc, t, seed)

        return guarded_trial(t, seed, n, m, build)

    records = sorted(run_parallel(run_trial, range(trials), threads), key=lambda r: r.trial_index)
    summary = McSummary.from_records(records)
    logger.info("mc_unisolvence finished: %s", summary.summary_line())
    return summary, records


def incremental_growth(
    spec: KernelSpec,
    domain: Domain,
    density: Density,
    m: int,
    boundary_strategy: BoundaryStrategy,
    n_max: int,
    seed: int,
) -> List[TrialRecord]:
    """Grow the interior one random point at a time, from K_0 = V_m up to n_max points.

    For every n >= 1 the record carries bordered_log_gap, the difference between
    log|det K_n| and log|det| of K_{n-1} bordered by the newest point, relative to
    max(1, |log|det K_n||).
    """
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max}")
    boundary = sample_boundary(domain, m, boundary_strategy)
    interior = sample_interior(domain, density, n_max, seed)

    records = []
    for k in range(n_max + 1):

        def build() -> TrialRecord:
            colloc = CollocationSet(interior[:k], boundary)
            record = diagnose(assemble_matrix(spec, colloc).matrix, colloc, k, seed)
            if k:
                previous = CollocationSet(interior[: k - 1], boundary)
                _, bordered_log = det_sign_logabs(bordered_matrix(spec, previous, interior[k - 1]))
                record.bordered_log_gap = relative_log_gap(record.log_abs_det, bordered_log)
            return record

        records.append(guarded_trial(k, seed, k, m, build))
    return records


def farfield_limit_check(spec: KernelSpec, colloc: CollocationSet, radii: Sequence[float]) -> List[FarfieldRow]:
    """Compare det K(p_R) with det L = epsilon^2 ell(0) det K_n as p_R moves away.

    p_R sits at distance R / epsilon from the centroid along the first axis. With
    K(p) bordered by column c, row r and corner e, det K(p) = det K_n (e - r K_n^-1 c),
    so the relative gap |det K(p) - det L| / |det L| equals |r K_n^-1 c| / |e|.
    """
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii[:-1], radii[1:])) or (radii and radii[0] <= 0.0):
        raise DomainError("far-field radii must be positive and increasing")

    base = assemble_matrix(spec, colloc).matrix
    _, base_log = det_sign_logabs(base)
    factor = scipy.linalg.lu_factor(base, check_finite=False)
    corner = spec.epsilon**2 * ell0(spec, colloc.dimension)
    limit_log = float(np.log(abs(corner)) + base_log)
    centroid = colloc.points.mean(axis=0)
    direction = np.zeros(colloc.dimension)
    direction[0] = 1.0

    rows = []
    size = colloc.size
    for radius in radii:
        distance = radius / spec.epsilon
        bordered = bordered_matrix(spec, colloc, centroid + distance * direction)
        coupling = float(bordered[size, :size] @ scipy.linalg.lu_solve(factor, bordered[:size, size]))
        schur = corner - coupling
        rows.append(
            FarfieldRow(
                radius=radius,
                distance=distance,
                log_abs_det=float(base_log + np.log(abs(schur))) if schur != 0.0 else float("-inf"),
                limit_log_abs_det=limit_log,
                relative_gap=abs(coupling) / abs(corner),
            )
        )
    return rows


def farfield_gaps_decrease(rows: Sequence[FarfieldRow]) -> bool:
    """Gaps strictly decrease while positive; once a gap underflows to 0 it stays 0"""
    gaps = [row.relative_gap for row in rows]
    for a, b in zip(gaps[:-1], gaps[1:]):
        if not (b < a or (a == 0.0 and b == 0.0)):
            return False
    return True


def relative_log_gap(log_abs_det: float, other: float) -> float:
    """|a - b| / max(1, |a|) for two log-magnitudes"""
    return abs(log_abs_det - other) / max(1.0, abs(log_abs_det))
