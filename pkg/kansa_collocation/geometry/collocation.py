from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from kansa_collocation.exceptions import DimensionMismatchError, DomainError, NonFiniteValueError
from kansa_collocation.geometry.domains import Domain
from kansa_collocation.geometry.sampling import (
    BOUNDARY_TOLERANCE,
    BoundaryStrategy,
    Density,
    ensure_distinct,
    sample_boundary,
    sample_interior,
)

INTERIOR = "interior"
BOUNDARY = "boundary"


@dataclass
class CollocationSet:
    """Interior points P_1..P_n and boundary points Q_1..Q_m.

    Construction enforces m >= 1, a common dimension, finite coordinates and
    exact distinctness across the union. Use ``on_domain`` to also check
    membership against a domain.
    """

    interior: np.ndarray
    boundary: np.ndarray

    def __post_init__(self):
        self.boundary = np.atleast_2d(np.asarray(self.boundary, dtype=float))
        if self.boundary.shape[0] < 1 or self.boundary.size == 0:
            raise DomainError("a collocation set needs at least one boundary point")
        d = self.boundary.shape[1]
        interior = np.asarray(self.interior, dtype=float)
        self.interior = interior.reshape(0, d) if interior.size == 0 else np.atleast_2d(interior)
        if self.interior.shape[1] != d:
            raise DimensionMismatchError(
                f"interior points have dimension {self.interior.shape[1]}, boundary points {d}"
            )
        if not np.all(np.isfinite(self.points)):
            raise NonFiniteValueError("collocation points must be finite")
        ensure_distinct(self.points, "collocation points")

    @classmethod
    def on_domain(cls, domain: Domain, interior: np.ndarray, boundary: np.ndarray) -> "CollocationSet":
        colloc = cls(interior, boundary)
        if colloc.dimension != domain.dimension:
            raise DimensionMismatchError(
                f"collocation set has dimension {colloc.dimension}, domain {domain.dimension}"
            )
        if colloc.n and not np.all(domain.contains(colloc.interior)):
            raise DomainError("interior points must lie strictly inside the domain")
        tolerance = BOUNDARY_TOLERANCE * max(1.0, domain.diameter)
        if np.any(domain.boundary_distance(colloc.boundary) > tolerance):
            raise DomainError("boundary points must lie on the domain boundary")
        return colloc

    @classmethod
    def sample(
        cls,
        domain: Domain,
        density: Density,
        n: int,
        m: int,
        strategy: BoundaryStrategy,
        seed: int,
        boundary: Optional[np.ndarray] = None,
    ) -> "CollocationSet":
        if boundary is None:
            boundary = sample_boundary(domain, m, strategy)
        return cls(sample_interior(domain, density, n, seed), boundary)

    @property
    def n(self) -> int:
        return int(self.interior.shape[0])

    @property
    def m(self) -> int:
        return int(self.boundary.shape[0])

    @property
    def size(self) -> int:
        return self.n + self.m

    @property
    def dimension(self) -> int:
        return int(self.boundary.shape[1])

    @property
    def points(self) -> np.ndarray:
        """Interior points first, then boundary points, matching the column order"""
        return np.vstack([self.interior, self.boundary])

    @property
    def roles(self) -> List[str]:
        return [INTERIOR] * self.n + [BOUNDARY] * self.m

    def with_interior(self, interior: np.ndarray) -> "CollocationSet":
        return CollocationSet(interior, self.boundary)

    def append_interior(self, point: np.ndarray) -> "CollocationSet":
        return self.with_interior(np.vstack([self.interior, np.atleast_2d(point)]))
