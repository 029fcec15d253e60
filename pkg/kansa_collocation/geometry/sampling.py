"""Interior densities, rejection sampling and boundary point strategies"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from kansa_collocation.exceptions import DomainError, DuplicatePointError, SamplingError
from kansa_collocation.geometry.domains import Domain

logger = logging.getLogger(__name__)

PROPOSAL_BUDGET = 10_000_000
MIN_ACCEPTANCE_RATE = 1e-6
MIN_BATCH = 65_536
MAX_BATCH = 1_000_000
DENSITY_SAMPLES = 1000
BOUNDARY_TOLERANCE = 1e-12

Weight = Callable[[np.ndarray], np.ndarray]


class DensityKind(str, Enum):
    UNIFORM = "uniform"
    CUSTOM = "custom"


def _unit_weight(points: np.ndarray) -> np.ndarray:
    return np.ones(points.shape[0])


@dataclass(frozen=True)
class Density:
    """Unnormalized probability density on the bounding box of a domain"""

    kind: DensityKind = DensityKind.UNIFORM
    weight: Weight = _unit_weight
    sup_bound: float = 1.0
    name: str = "uniform"

    @classmethod
    def uniform(cls) -> "Density":
        return cls()

    @classmethod
    def custom(cls, weight: Weight, sup_bound: float, name: str = "custom") -> "Density":
        return cls(DensityKind.CUSTOM, weight, float(sup_bound), name)

    @classmethod
    def gaussian_bump(cls, center: Sequence[float], width: float) -> "Density":
        """Weight exp(-|P - c|^2 / (2 w^2)), bounded by 1"""
        c = np.asarray(center, dtype=float)
        if not width > 0.0:
            raise DomainError(f"gaussian density width must be positive, got {width}")

        def weight(points: np.ndarray) -> np.ndarray:
            return np.exp(-np.sum((points - c) ** 2, axis=1) / (2.0 * width * width))

        return cls.custom(weight, 1.0, name="gaussian")

    def validate(self, domain: Domain) -> None:
        """Spot check the weight against sup_bound on uniform samples of the bounding box.

        Uses its own generator so the sampling stream of the caller is untouched.
        """
        if not self.sup_bound > 0.0:
            raise DomainError(f"density sup_bound must be positive, got {self.sup_bound}")
        if self.kind is DensityKind.UNIFORM:
            return
        lo, hi = domain.bounding_box
        samples = np.random.default_rng(0).uniform(lo, hi, size=(DENSITY_SAMPLES, domain.dimension))
        values = np.asarray(self.weight(samples), dtype=float)
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise DomainError(f"density '{self.name}' is negative or non-finite on the bounding box")
        if values.max() > self.sup_bound * (1.0 + 1e-12):
            raise DomainError(
                f"density '{self.name}' reaches {values.max():.6g}, above sup_bound {self.sup_bound:.6g}"
            )
        if not np.any(values[domain.contains(samples)] > 0.0):
            raise DomainError(f"density '{self.name}' vanishes on every interior sample")

    def to_dict(self):
        return {"kind": self.kind.value, "name": self.name, "sup_bound": self.sup_bound}


class BoundaryStrategyKind(str, Enum):
    EQUISPACED = "equispaced"
    RANDOM = "random"
    USER_LIST = "user_list"


@dataclass(frozen=True)
class BoundaryStrategy:
    kind: BoundaryStrategyKind = BoundaryStrategyKind.EQUISPACED
    seed: int = 0
    points: Optional[np.ndarray] = field(default=None, compare=False)

    @classmethod
    def equispaced(cls) -> "BoundaryStrategy":
        return cls()

    @classmethod
    def random(cls, seed: int) -> "BoundaryStrategy":
        return cls(BoundaryStrategyKind.RANDOM, seed=seed)

    @classmethod
    def user_list(cls, points: Sequence[Sequence[float]]) -> "BoundaryStrategy":
        return cls(BoundaryStrategyKind.USER_LIST, points=np.asarray(points, dtype=float))

    def to_dict(self):
        data = {"kind": self.kind.value}
        if self.kind is BoundaryStrategyKind.RANDOM:
            data["seed"] = self.seed
        if self.points is not None:
            data["points"] = self.points.tolist()
        return data


def sample_interior(domain: Domain, density: Density, n: int, seed: int) -> np.ndarray:
    """Draw n i.i.d. interior points by rejection against the bounding box.

    Each batch proposes uniform points in the box and one uniform level in
    [0, sup_bound) per proposal; a proposal is kept when it lies strictly inside
    the domain and below the weight. Batch sizes depend on n only, so the
    result is a deterministic function of (domain, density, n, seed).
    """
    if n < 0:
        raise DomainError(f"interior count must be nonnegative, got {n}")
    d = domain.dimension
    if n == 0:
        return np.empty((0, d))
    density.validate(domain)

    rng = np.random.default_rng(seed)
    lo, hi = domain.bounding_box
    batch = min(MAX_BATCH, max(MIN_BATCH, 4 * n))
    accepted = []
    count = 0
    proposals = 0
    while count < n:
        if proposals >= PROPOSAL_BUDGET:
            rate = count / proposals
            if rate < MIN_ACCEPTANCE_RATE:
                raise SamplingError(
                    f"density '{density.name}' is degenerate on this domain: accepted {count} of "
                    f"{proposals} proposals, rate {rate:.3g} below floor {MIN_ACCEPTANCE_RATE:g}"
                )
            raise SamplingError(
                f"rejection sampler reached {count} of {n} points within the budget of {PROPOSAL_BUDGET} "
                f"proposals (rate {rate:.3g}, density '{density.name}'); request fewer points"
            )
        size = min(batch, PROPOSAL_BUDGET - proposals)
        candidates = rng.uniform(lo, hi, size=(size, d))
        levels = rng.uniform(0.0, density.sup_bound, size=size)
        keep = domain.contains(candidates) & (levels < density.weight(candidates))
        accepted.append(candidates[keep])
        count += int(keep.sum())
        proposals += size
    logger.debug("sampled %d interior points from %d proposals (seed %d)", n, proposals, seed)
    return np.concatenate(accepted)[:n]


def sample_boundary(domain: Domain, m: int, strategy: BoundaryStrategy) -> np.ndarray:
    if m < 1:
        raise DomainError(f"at least one boundary point is required, got m={m}")
    if strategy.kind is BoundaryStrategyKind.EQUISPACED:
        points = domain.equispaced_boundary(m)
    elif strategy.kind is BoundaryStrategyKind.RANDOM:
        points = domain.random_boundary(m, np.random.default_rng(strategy.seed))
    else:
        points = _validated_user_list(domain, m, strategy.points)
    ensure_distinct(points, "boundary points")
    return points


def _validated_user_list(domain: Domain, m: int, points: Optional[np.ndarray]) -> np.ndarray:
    if points is None:
        raise DomainError("user_list boundary strategy requires points")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] != m:
        raise DomainError(f"user boundary list has {pts.shape[0]} points, expected m={m}")
    tolerance = BOUNDARY_TOLERANCE * max(1.0, domain.diameter)
    off = domain.boundary_distance(pts) > tolerance
    if off.any():
        raise DomainError(f"user boundary point {int(np.argmax(off))} does not lie on the boundary")
    return pts


def ensure_distinct(points: np.ndarray, what: str = "points") -> None:
    """Raise DuplicatePointError unless all rows are exactly distinct"""
    if points.shape[0] < 2:
        return
    unique, inverse, counts = np.unique(points, axis=0, return_inverse=True, return_counts=True)
    if unique.shape[0] != points.shape[0]:
        dup = int(np.argmax(counts > 1))
        rows = np.flatnonzero(inverse.reshape(-1) == dup).tolist()
        raise DuplicatePointError(f"{what} contain a repeated point at rows {rows}")


def min_separation(points: np.ndarray) -> float:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] < 2:
        raise DomainError("min_separation needs at least 2 points")
    return float(pdist(pts).min())
