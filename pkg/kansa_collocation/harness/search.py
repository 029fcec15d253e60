"""Random-restart local search for nearly singular Kansa configurations.

The objective is sigma_min / sigma_max. A step moves one interior point by a
Gaussian jitter and is kept only if the objective drops; otherwise the jitter
scale is halved.
"""
import logging
from typing import Optional

import numpy as np

from kansa_collocation.assembly import assemble_matrix
from kansa_collocation.exceptions import DomainError, DuplicatePointError
from kansa_collocation.geometry import (
    BoundaryStrategy,
    CollocationSet,
    Density,
    Domain,
    sample_boundary,
    sample_interior,
)
from kansa_collocation.kernels import KernelSpec
from kansa_collocation.models import SearchResult, TrialRecord

from .diagnostics import diagnose

logger = logging.getLogger(__name__)

JITTER_FRACTION = 0.05


def near_singular_search(
    spec: KernelSpec,
    domain: Domain,
    m: int,
    n: int,
    restarts: int,
    steps: int,
    seed: int,
    density: Optional[Density] = None,
    boundary_strategy: Optional[BoundaryStrategy] = None,
    initial_interior: Optional[np.ndarray] = None,
    jitter: Optional[float] = None,
) -> SearchResult:
    """Return the most singular configuration met.

    Restart r starts from interior points sampled with seed + r, except that
    ``initial_interior`` (when given) replaces the first start. Jitter directions
    come from a single generator seeded with ``seed``.
    """
    if restarts < 1 or steps < 0:
        raise DomainError("near-singular search needs restarts >= 1 and steps >= 0")
    density = density or Density.uniform()
    boundary = sample_boundary(domain, m, boundary_strategy or BoundaryStrategy.equispaced())
    rng = np.random.default_rng(seed)
    step0 = jitter if jitter is not None else JITTER_FRACTION * domain.diameter

    def evaluate(interior: np.ndarray, restart: int) -> TrialRecord:
        colloc = CollocationSet.on_domain(domain, interior, boundary)
        return diagnose(assemble_matrix(spec, colloc).matrix, colloc, restart, seed + restart)

    best: Optional[TrialRecord] = None
    initial: Optional[TrialRecord] = None
    best_interior = np.empty((0, domain.dimension))
    history = []
    accepted = 0
    for restart in range(restarts):
        if restart == 0 and initial_interior is not None:
            interior = np.atleast_2d(np.asarray(initial_interior, dtype=float))
        else:
            interior = sample_interior(domain, density, n, seed + restart)
        current = evaluate(interior, restart)
        if initial is None:
            initial = current
        if best is None or current.ratio < best.ratio:
            best, best_interior = current, interior
        history.append(best.ratio)

        step = step0
        for _ in range(steps if interior.shape[0] else 0):
            moved = interior.copy()
            i = int(rng.integers(interior.shape[0]))
            moved[i] += rng.normal(0.0, step, size=domain.dimension)
            candidate = None
            if domain.contains(moved[i:i + 1])[0]:
                try:
                    candidate = evaluate(moved, restart)
                except DuplicatePointError:
                    candidate = None
            if candidate is not None and candidate.ratio < current.ratio:
                interior, current = moved, candidate
                accepted += 1
                if current.ratio < best.ratio:
                    best, best_interior = current, interior
            else:
                step *= 0.5
            history.append(best.ratio)
        logger.debug("restart %d ends at objective %.3e", restart, current.ratio)

    logger.info("near-singular search: objective %.3e -> %.3e", initial.ratio, best.ratio)
    return SearchResult(
        best=best,
        initial=initial,
        interior=best_interior,
        boundary=boundary,
        objective_history=history,
        accepted_steps=accepted,
    )
