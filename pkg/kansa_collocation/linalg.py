"""Dense solves and singularity diagnostics on top of LAPACK.

A matrix is judged singular when sigma_min <= singularity_threshold(N, sigma_max),
i.e. N * machine epsilon * sigma_max.
"""
import logging
import warnings
from typing import Tuple

import numpy as np
import scipy.linalg

from kansa_collocation.exceptions import (
    AsymmetricMatrixError,
    ConvergenceError,
    DimensionMismatchError,
    NonFiniteValueError,
    SingularMatrixError,
)
from kansa_collocation.models import Coefficients, KansaSystem, SolveReport

logger = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)
SYMMETRY_TOLERANCE = 1e-12


def singularity_threshold(size: int, sigma_max: float) -> float:
    return size * EPS * sigma_max


def lu_solve(matrix: np.ndarray, rhs: np.ndarray) -> Tuple[np.ndarray, float, float]:
    """Row-pivoted LU solve returning (solution, residual_inf, pivot_growth).

    A pivot U_kk with |U_kk| <= N * eps * max|row k of the permuted matrix| is
    treated as zero and reported through SingularMatrixError.pivot_index.
    """
    a = _square(matrix)
    b = np.asarray(rhs, dtype=float).reshape(-1)
    size = a.shape[0]
    if b.shape[0] != size:
        raise DimensionMismatchError(f"rhs has length {b.shape[0]}, matrix is {size} x {size}")
    if size == 0:
        return np.empty(0), 0.0, 1.0

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)

    perm = np.arange(size)
    for i, p in enumerate(piv):
        perm[i], perm[p] = perm[p], perm[i]
    row_scale = np.abs(a[perm]).max(axis=1)
    pivots = np.abs(np.diag(lu))
    small = pivots <= size * EPS * row_scale
    if small.any():
        k = int(np.argmax(small))
        raise SingularMatrixError(f"pivot {k} is {pivots[k]:.3e}, below the singularity threshold", pivot_index=k)

    x = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    residual = float(np.max(np.abs(a @ x - b)))
    a_max = float(np.abs(a).max())
    growth = float(np.abs(np.triu(lu)).max()) / a_max if a_max > 0.0 else 1.0
    return x, residual, growth


def svd_extremes(matrix: np.ndarray) -> Tuple[float, float]:
    """(sigma_min, sigma_max)"""
    a = _square(matrix)
    try:
        sigma = scipy.linalg.svdvals(a, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise ConvergenceError(f"SVD did not converge: {e}") from e
    return float(sigma[-1]), float(sigma[0])


def det_sign_logabs(matrix: np.ndarray) -> Tuple[int, float]:
    """Sign and log|det| from a pivoted LU factorization; sign 0 for an exactly zero pivot"""
    sign, logabs = np.linalg.slogdet(_square(matrix))
    if sign == 0:
        return 0, float("-inf")
    return int(np.sign(sign)), float(logabs)


def symmetric_min_eig(matrix: np.ndarray) -> float:
    a = _square(matrix)
    scale = np.maximum(np.abs(a), np.abs(a.T))
    if np.any(np.abs(a - a.T) > SYMMETRY_TOLERANCE * scale):
        raise AsymmetricMatrixError("matrix is not symmetric to 1e-12 relative")
    try:
        return float(scipy.linalg.eigvalsh(a, subset_by_index=[0, 0], check_finite=False)[0])
    except np.linalg.LinAlgError as e:
        raise ConvergenceError(f"symmetric eigensolver did not converge: {e}") from e


def solve_system(system: KansaSystem) -> SolveReport:
    """Solve K x = rhs and attach the singular-value diagnostics"""
    x, residual, growth = lu_solve(system.matrix, system.rhs)
    sigma_min, sigma_max = svd_extremes(system.matrix)
    singular = sigma_min <= singularity_threshold(system.size, sigma_max)
    if singular:
        logger.warning("system of size %d is numerically singular (sigma_min=%.3e)", system.size, sigma_min)
    return SolveReport(
        coefficients=Coefficients.from_vector(x, system.n),
        sigma_min=sigma_min,
        sigma_max=sigma_max,
        cond2=condition_number(sigma_min, sigma_max),
        residual_inf=residual,
        singular_flag=bool(singular),
        pivot_growth=growth,
    )


def condition_number(sigma_min: float, sigma_max: float) -> float:
    return sigma_max / sigma_min if sigma_min > 0.0 else float("inf")


def _square(matrix: np.ndarray) -> np.ndarray:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteValueError("matrix has non-finite entries")
    return a
