"""Dirichlet Poisson problems: Laplacian(u) = f in the domain, u = g on its boundary.

Source and boundary functions are vectorized: they take a (k, d) array of points
and return k values.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from kansa_collocation.exceptions import ConfigurationError, DimensionMismatchError, DomainError
from kansa_collocation.geometry import Density, Domain, ensure_distinct, sample_interior

logger = logging.getLogger(__name__)

PointFunction = Callable[[np.ndarray], np.ndarray]

SPOT_CHECK_POINTS = 20
SPOT_CHECK_STEP = 1e-3
SPOT_CHECK_TOLERANCE = 1e-4


@dataclass
class PoissonProblem:
    domain: Domain
    f: PointFunction
    g: PointFunction
    exact: Optional[PointFunction] = None
    name: str = "custom"
    boundary_points: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.exact is not None:
            self.check_manufactured()

    def check_manufactured(self, seed: int = 0) -> None:
        """Compare f with a second-order finite-difference Laplacian of the exact solution"""
        points = sample_interior(self.domain, Density.uniform(), SPOT_CHECK_POINTS, seed)
        residual = np.abs(self.f(points) - fd_laplacian(self.exact, points, SPOT_CHECK_STEP))
        worst = float(residual.max())
        if worst >= SPOT_CHECK_TOLERANCE:
            raise ConfigurationError(
                f"problem '{self.name}': source does not match the Laplacian of the exact solution "
                f"(max deviation {worst:.3e})"
            )
        logger.debug("problem %s passes the manufactured-solution spot check (%.2e)", self.name, worst)


def fd_laplacian(u: PointFunction, points: np.ndarray, h: float) -> np.ndarray:
    """Central-difference Laplacian, 2d + 1 point stencil"""
    points = np.atleast_2d(points)
    center = u(points)
    total = np.zeros(points.shape[0])
    for axis in range(points.shape[1]):
        shift = np.zeros(points.shape[1])
        shift[axis] = h
        total += u(points + shift) - 2.0 * center + u(points - shift)
    return total / (h * h)


def _constant_function(value: float) -> PointFunction:
    def function(points: np.ndarray) -> np.ndarray:
        return np.full(np.atleast_2d(points).shape[0], float(value))

    return function


def zero(domain: Domain) -> PoissonProblem:
    return constant(domain, 0.0, name="zero")


def constant(domain: Domain, value: float, name: str = "constant") -> PoissonProblem:
    u = _constant_function(value)
    return PoissonProblem(domain, _constant_function(0.0), u, exact=u, name=name)


def manufactured_sine(domain: Domain) -> PoissonProblem:
    """u* = prod_i sin(pi x_i), f = -d pi^2 u*, g = u* on the boundary"""
    d = domain.dimension

    def exact(points: np.ndarray) -> np.ndarray:
        return np.prod(np.sin(np.pi * np.atleast_2d(points)), axis=1)

    def source(points: np.ndarray) -> np.ndarray:
        return -d * np.pi**2 * exact(points)

    return PoissonProblem(domain, source, exact, exact=exact, name="manufactured_sine")


def affine(domain: Domain, slope: Sequence[float], offset: float = 0.0) -> PoissonProblem:
    """Harmonic u* = slope . x + offset"""
    a = np.asarray(slope, dtype=float)
    if a.shape != (domain.dimension,):
        raise DimensionMismatchError(f"affine slope must have {domain.dimension} entries")

    def exact(points: np.ndarray) -> np.ndarray:
        return np.atleast_2d(points) @ a + offset

    return PoissonProblem(domain, _constant_function(0.0), exact, exact=exact, name="affine")


def tabulated(domain: Domain, points: np.ndarray, values: np.ndarray, source: float = 0.0) -> PoissonProblem:
    """Boundary data given at fixed points; g is defined only on those points.

    The table also provides the boundary collocation points.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vals = np.asarray(values, dtype=float).reshape(-1)
    if pts.shape[1] != domain.dimension:
        raise DimensionMismatchError(
            f"tabulated points have dimension {pts.shape[1]}, domain {domain.dimension}"
        )
    if pts.shape[0] != vals.shape[0]:
        raise ConfigurationError("tabulated boundary data needs one value per point")
    ensure_distinct(pts, "tabulated boundary points")
    lookup = {tuple(p): v for p, v in zip(pts.tolist(), vals.tolist())}

    def boundary_values(query: np.ndarray) -> np.ndarray:
        out = []
        for p in np.atleast_2d(query).tolist():
            if tuple(p) not in lookup:
                raise DomainError(f"no tabulated boundary value at {p}")
            out.append(lookup[tuple(p)])
        return np.asarray(out, dtype=float)

    return PoissonProblem(
        domain, _constant_function(source), boundary_values, name="tabulated", boundary_points=pts
    )
