"""Kansa block system assembly and evaluation of the discrete solution.

Block layout of the N x N matrix (N = n + m)::

    [ Laplacian of phi_j at P_i    Laplacian of psi_k at P_i ]   n PDE rows
    [ phi_j(Q_h)                   psi_k(Q_h)                ]   m boundary rows

Columns 0..n-1 are centered at the interior points, columns n..N-1 at the
boundary points.
"""
import logging
from typing import Union

import numpy as np

from kansa_collocation.exceptions import DimensionMismatchError, DuplicatePointError, NonFiniteValueError
from kansa_collocation.geometry import CollocationSet
from kansa_collocation.kernels import KernelSpec, ell0, kernel_matrix, laplacian_matrix
from kansa_collocation.models import Coefficients, KansaSystem
from kansa_collocation.problems import PoissonProblem

logger = logging.getLogger(__name__)


def assemble_matrix(spec: KernelSpec, colloc: CollocationSet) -> KansaSystem:
    """Fill the four blocks; the right-hand side is left at zero"""
    centers = colloc.points
    if colloc.n:
        upper = laplacian_matrix(spec, colloc.interior, centers)
    else:
        upper = np.empty((0, colloc.size))
    lower = kernel_matrix(spec, colloc.boundary, centers)
    matrix = np.vstack([upper, lower])
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteValueError(f"kernel {spec.label} produced non-finite matrix entries")
    return KansaSystem(matrix=matrix, rhs=np.zeros(colloc.size), n=colloc.n, m=colloc.m)


def assemble_rhs(problem: PoissonProblem, colloc: CollocationSet) -> np.ndarray:
    """f at the interior points followed by g at the boundary points"""
    if colloc.dimension != problem.domain.dimension:
        raise DimensionMismatchError(
            f"collocation set has dimension {colloc.dimension}, problem {problem.domain.dimension}"
        )
    source = np.asarray(problem.f(colloc.interior), dtype=float) if colloc.n else np.empty(0)
    data = np.asarray(problem.g(colloc.boundary), dtype=float)
    rhs = np.concatenate([source.reshape(-1), data.reshape(-1)])
    if rhs.shape[0] != colloc.size:
        raise DimensionMismatchError(f"right-hand side has {rhs.shape[0]} entries, expected {colloc.size}")
    bad = ~np.isfinite(rhs)
    if bad.any():
        raise NonFiniteValueError(
            f"problem '{problem.name}' gives non-finite data at collocation rows {np.flatnonzero(bad).tolist()}"
        )
    return rhs


def assemble_system(spec: KernelSpec, problem: PoissonProblem, colloc: CollocationSet) -> KansaSystem:
    system = assemble_matrix(spec, colloc)
    system.rhs = assemble_rhs(problem, colloc)
    return system


def evaluate_solution(
    spec: KernelSpec, colloc: CollocationSet, coeffs: Coefficients, p: np.ndarray
) -> Union[float, np.ndarray]:
    """u_N at one point, or at each row of a (k, d) array"""
    coeffs.check_lengths(colloc.n, colloc.m)
    p_arr = np.asarray(p, dtype=float)
    single = p_arr.ndim == 1
    values = kernel_matrix(spec, np.atleast_2d(p_arr), colloc.points) @ coeffs.vector
    return float(values[0]) if single else values


def bordered_matrix(spec: KernelSpec, colloc: CollocationSet, p: np.ndarray) -> np.ndarray:
    """Kansa matrix of colloc bordered by a candidate interior point p.

    The last column holds the Laplacian of phi_p at each P_i followed by phi_p at
    each Q_h; the last row holds the Laplacian of every existing basis function
    at p; the corner is epsilon^2 * ell(0). A symmetric row and column permutation
    turns this into the Kansa matrix with p appended to the interior points.
    """
    point = np.asarray(p, dtype=float).reshape(1, -1)
    if point.shape[1] != colloc.dimension:
        raise DimensionMismatchError(
            f"candidate has dimension {point.shape[1]}, collocation set {colloc.dimension}"
        )
    clashes = np.all(colloc.points == point, axis=1)
    if clashes.any():
        raise DuplicatePointError(f"candidate point coincides with collocation point {int(np.argmax(clashes))}")

    size = colloc.size
    bordered = np.empty((size + 1, size + 1))
    bordered[:size, :size] = assemble_matrix(spec, colloc).matrix
    column = np.empty(size)
    if colloc.n:
        column[: colloc.n] = laplacian_matrix(spec, colloc.interior, point)[:, 0]
    column[colloc.n:] = kernel_matrix(spec, colloc.boundary, point)[:, 0]
    bordered[:size, size] = column
    bordered[size, :size] = laplacian_matrix(spec, point, colloc.points)[0]
    bordered[size, size] = spec.epsilon**2 * ell0(spec, colloc.dimension)
    return bordered
