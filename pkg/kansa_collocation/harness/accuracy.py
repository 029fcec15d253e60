"""Accuracy against manufactured solutions: point-count refinement and shape-parameter sweeps"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from kansa_collocation.assembly import assemble_system, evaluate_solution
from kansa_collocation.exceptions import ConfigurationError, DomainError, KansaError, SingularMatrixError
from kansa_collocation.geometry import (
    BoundaryStrategy,
    CollocationSet,
    Density,
    sample_boundary,
    sample_interior,
)
from kansa_collocation.kernels import KernelSpec
from kansa_collocation.linalg import singularity_threshold, solve_system
from kansa_collocation.models import STATUS_ERROR, STATUS_SINGULAR, ConvergenceRow
from kansa_collocation.problems import PoissonProblem

from .diagnostics import run_parallel

logger = logging.getLogger(__name__)

# test points are drawn from their own stream, seed + offset
TEST_POINT_SEED_OFFSET = 7919


def convergence_study(
    spec: KernelSpec,
    problem: PoissonProblem,
    schedule: Sequence[Tuple[int, int]],
    test_points: int,
    seed: int,
    density: Optional[Density] = None,
    boundary_strategy: Optional[BoundaryStrategy] = None,
    threads: Optional[int] = None,
) -> List[ConvergenceRow]:
    """Solve on each (n, m) of the schedule and measure the error at random test points"""
    _require_exact(problem)
    sizes = [n + m for n, m in schedule]
    if any(b < a for a, b in zip(sizes[:-1], sizes[1:])):
        raise DomainError("convergence schedule must be nondecreasing in N = n + m")
    density = density or Density.uniform()
    strategy = boundary_strategy or BoundaryStrategy.equispaced()
    test_pts = _test_points(problem, test_points, seed)

    def run_entry(entry: Tuple[int, int]) -> ConvergenceRow:
        n, m = entry
        colloc = _collocation(problem, density, strategy, n, m, seed)
        return _accuracy_row(spec, problem, colloc, test_pts, seed)

    return run_parallel(run_entry, schedule, threads)


def epsilon_sweep(
    spec_template: KernelSpec,
    problem: PoissonProblem,
    n: int,
    m: int,
    epsilons: Sequence[float],
    seed: int,
    test_points: int = 200,
    density: Optional[Density] = None,
    boundary_strategy: Optional[BoundaryStrategy] = None,
    threads: Optional[int] = None,
) -> List[ConvergenceRow]:
    """One point set, many shape parameters"""
    _require_exact(problem)
    epsilons = [float(e) for e in epsilons]
    if any(e <= 0.0 for e in epsilons) or any(b < a for a, b in zip(epsilons[:-1], epsilons[1:])):
        raise DomainError("epsilons must be positive and sorted")
    colloc = _collocation(
        problem, density or Density.uniform(), boundary_strategy or BoundaryStrategy.equispaced(), n, m, seed
    )
    test_pts = _test_points(problem, test_points, seed)

    def run_epsilon(epsilon: float) -> ConvergenceRow:
        return _accuracy_row(spec_template.with_epsilon(epsilon), problem, colloc, test_pts, seed)

    return run_parallel(run_epsilon, epsilons, threads)


def median_rms(rows: Sequence[ConvergenceRow]) -> float:
    """Median RMS error over the rows that produced a solution"""
    values = [row.rms_error for row in rows if row.ok]
    return float(np.median(values)) if values else float("nan")


def _require_exact(problem: PoissonProblem) -> None:
    if problem.exact is None:
        raise ConfigurationError(f"problem '{problem.name}' has no exact solution to measure errors against")


def _collocation(
    problem: PoissonProblem, density: Density, strategy: BoundaryStrategy, n: int, m: int, seed: int
) -> CollocationSet:
    if problem.boundary_points is not None:
        boundary = problem.boundary_points
    else:
        boundary = sample_boundary(problem.domain, m, strategy)
    return CollocationSet(sample_interior(problem.domain, density, n, seed), boundary)


def _test_points(problem: PoissonProblem, count: int, seed: int) -> np.ndarray:
    if count < 1:
        raise DomainError("at least one test point is required")
    return sample_interior(problem.domain, Density.uniform(), count, seed + TEST_POINT_SEED_OFFSET)


def _accuracy_row(
    spec: KernelSpec, problem: PoissonProblem, colloc: CollocationSet, test_pts: np.ndarray, seed: int
) -> ConvergenceRow:
    row = ConvergenceRow(N=colloc.size, n=colloc.n, m=colloc.m, epsilon=spec.epsilon, seed=seed)
    try:
        report = solve_system(assemble_system(spec, problem, colloc))
    except SingularMatrixError as e:
        logger.warning("N=%d, epsilon=%g: singular system (%s)", colloc.size, spec.epsilon, e)
        row.status, row.reason = STATUS_SINGULAR, str(e)
        return row
    except KansaError as e:
        row.status, row.reason = STATUS_ERROR, f"{type(e).__name__}: {e}"
        return row

    row.cond2 = report.cond2
    if report.singular_flag:
        threshold = singularity_threshold(colloc.size, report.sigma_max)
        logger.warning(
            "N=%d, epsilon=%g: sigma_min %.3e is below the singularity threshold %.3e",
            colloc.size,
            spec.epsilon,
            report.sigma_min,
            threshold,
        )
        row.status = STATUS_SINGULAR
        row.reason = f"sigma_min {report.sigma_min:.3e} <= N * eps * sigma_max = {threshold:.3e}"
        return row

    error = evaluate_solution(spec, colloc, report.coefficients, test_pts) - problem.exact(test_pts)
    row.rms_error = float(np.sqrt(np.mean(error * error)))
    row.max_error = float(np.max(np.abs(error)))
    logger.debug("N=%d epsilon=%g rms=%.3e cond2=%.3e", colloc.size, spec.epsilon, row.rms_error, row.cond2)
    return row
