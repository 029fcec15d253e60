"""Kernel checks beyond the analytic admissibility report: the finite-difference
Laplacian oracle and positive definiteness of boundary interpolation matrices.
"""
import logging

import numpy as np

from kansa_collocation.geometry import Box, Density, Domain, sample_interior
from kansa_collocation.kernels import (
    AdmissibilityCheck,
    AdmissibilityReport,
    KernelFamily,
    KernelSpec,
    admissibility_report,
    ell0,
    eval_laplacian,
    kernel_matrix,
)
from kansa_collocation.linalg import symmetric_min_eig
from kansa_collocation.problems import fd_laplacian

logger = logging.getLogger(__name__)

FD_STEP = 1e-4
FD_TOLERANCE = 1e-6
MIN_DISTANCE = 1e-3
MAX_DISTANCE = 10.0
# Matern kernels are only finitely smooth at their center: below this epsilon * r the
# central-difference truncation error of a nu = 3/2 kernel exceeds FD_TOLERANCE
MATERN_MIN_RHO = 0.5


def laplacian_fd_check(spec: KernelSpec, d: int, pairs: int = 200, seed: int = 0) -> AdmissibilityCheck:
    """eval_laplacian against a central-difference Laplacian of the kernel.

    Distances are log-uniform in [1e-3, 10], starting at MATERN_MIN_RHO / epsilon
    instead for Matern kernels. An entry passes when its error is below 1e-6
    relative to the value or to epsilon^2 |ell(0)|, whichever is larger; the
    second scale covers points near roots of ell. The detail reports the range used.
    """
    rng = np.random.default_rng(seed)
    lo = MIN_DISTANCE
    if spec.family is KernelFamily.MATERN:
        lo = max(lo, MATERN_MIN_RHO / spec.epsilon)
    distances = np.exp(rng.uniform(np.log(lo), np.log(MAX_DISTANCE), size=pairs))
    directions = rng.standard_normal(size=(pairs, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    centers = rng.uniform(0.0, 1.0, size=(pairs, d))
    points = centers + distances[:, None] * directions

    scale = spec.epsilon**2 * abs(ell0(spec, d))
    worst = 0.0
    for center, point in zip(centers, points):
        exact = eval_laplacian(spec, d, center, point)

        def kernel(x: np.ndarray, center=center) -> np.ndarray:
            return kernel_matrix(spec, x, center.reshape(1, -1))[:, 0]

        approx = float(fd_laplacian(kernel, point.reshape(1, -1), FD_STEP)[0])
        worst = max(worst, abs(approx - exact) / max(abs(exact), scale))
    return AdmissibilityCheck(
        name="laplacian_fd",
        passed=bool(worst < FD_TOLERANCE),
        detail=(
            f"max scaled error {worst:.3e} over {pairs} pairs, "
            f"distances in [{lo:.3g}, {MAX_DISTANCE:g}] (step {FD_STEP:g})"
        ),
    )


def interpolation_matrix_check(
    spec: KernelSpec, domain: Domain, m_max: int = 30, sets: int = 20, seed: int = 0
) -> AdmissibilityCheck:
    """Smallest eigenvalue of V_m on random point sets with m in [2, m_max]"""
    rng = np.random.default_rng(seed)
    smallest = np.inf
    for k in range(sets):
        m = int(rng.integers(2, m_max + 1))
        points = sample_interior(domain, Density.uniform(), m, seed + k)
        smallest = min(smallest, symmetric_min_eig(kernel_matrix(spec, points, points)))
    return AdmissibilityCheck(
        name="interpolation_positive_definite",
        passed=bool(smallest > 0.0),
        detail=f"min eigenvalue of V_m over {sets} sets: {smallest:.3e}",
    )


def kernel_check(spec: KernelSpec, d: int, m_max: int = 30, seed: int = 0) -> AdmissibilityReport:
    """Admissibility report extended with the finite-difference and V_m checks.

    The V_m check samples a box of side m_max^(1/d) / epsilon, so random points
    sit about one kernel width apart whatever the shape parameter.
    """
    report = admissibility_report(spec, d)
    report.checks.append(laplacian_fd_check(spec, d, seed=seed))
    side = m_max ** (1.0 / d) / spec.epsilon
    box = Box(np.zeros(d), np.full(d, side))
    report.checks.append(interpolation_matrix_check(spec, box, m_max=m_max, seed=seed))
    for check in report.checks:
        logger.info("%s %s: %s", check.name, "pass" if check.passed else "FAIL", check.detail)
    return report
