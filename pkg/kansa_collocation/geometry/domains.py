"""Bounded domains with an interior indicator and a boundary parametrization.

Boundary layouts produced by ``equispaced_boundary``:

* 2D boxes and polygons: equal arc-length steps along the perimeter, starting
  at the first vertex (the lower-left corner for boxes) and running
  counterclockwise for boxes, in vertex order for polygons;
* balls: equal angles from the positive first axis in 2D, a Fibonacci lattice
  on the sphere in 3D;
* boxes in d >= 3: a cell-centered lattice on every face, filled round-robin
  across the faces (axis 0 low, axis 0 high, axis 1 low, ...).
"""
import itertools
import math
from abc import ABC, abstractmethod
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from kansa_collocation.exceptions import DimensionMismatchError, DomainError

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
BOX_MARGIN = 1e-6


class Domain(ABC):
    """Bounded connected open set in R^d"""

    dimension: int

    @property
    @abstractmethod
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        """Corners of a box strictly containing the closure of the domain"""

    @abstractmethod
    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask, true only for strictly interior points"""

    @abstractmethod
    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        """Euclidean distance from each point to the boundary"""

    @abstractmethod
    def equispaced_boundary(self, m: int) -> np.ndarray:
        ...

    @abstractmethod
    def random_boundary(self, m: int, rng: np.random.Generator) -> np.ndarray:
        ...

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        ...

    @property
    def diameter(self) -> float:
        lo, hi = self.bounding_box
        return float(np.linalg.norm(hi - lo))

    def _as_points(self, points: np.ndarray) -> np.ndarray:
        arr = np.atleast_2d(np.asarray(points, dtype=float))
        if arr.shape[1] != self.dimension:
            raise DimensionMismatchError(
                f"points have dimension {arr.shape[1]}, domain has dimension {self.dimension}"
            )
        return arr


class Box(Domain):
    """Axis-aligned hyperrectangle, the unit square by default"""

    def __init__(self, lower: Sequence[float] = (0.0, 0.0), upper: Sequence[float] = (1.0, 1.0)):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise DimensionMismatchError("box corners must be vectors of equal length")
        if self.lower.shape[0] < 2:
            raise DomainError("box must have dimension at least 2")
        if not np.all(self.upper > self.lower):
            raise DomainError("box upper corner must exceed lower corner in every coordinate")
        self.dimension = int(self.lower.shape[0])

    @classmethod
    def unit(cls, dimension: int = 2) -> "Box":
        return cls(np.zeros(dimension), np.ones(dimension))

    @property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        margin = BOX_MARGIN * (self.upper - self.lower)
        return self.lower - margin, self.upper + margin

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = self._as_points(points)
        return np.all((pts > self.lower) & (pts < self.upper), axis=1)

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        pts = self._as_points(points)
        inside = np.all((pts >= self.lower) & (pts <= self.upper), axis=1)
        to_face = np.minimum(pts - self.lower, self.upper - pts).min(axis=1)
        outside = np.linalg.norm(pts - np.clip(pts, self.lower, self.upper), axis=1)
        return np.where(inside, to_face, outside)

    def equispaced_boundary(self, m: int) -> np.ndarray:
        if self.dimension == 2:
            return perimeter_points(self._corners(), np.arange(m) / m)
        faces = self._faces()
        per_face = math.ceil(m / len(faces))
        k = max(1, math.ceil(per_face ** (1.0 / (self.dimension - 1)) - 1e-12))
        centers = (np.arange(k) + 0.5) / k
        points = []
        for cell in itertools.product(centers, repeat=self.dimension - 1):
            for axis, side in faces:
                points.append(self._face_point(axis, side, np.asarray(cell)))
                if len(points) == m:
                    return np.asarray(points)
        return np.asarray(points)

    def random_boundary(self, m: int, rng: np.random.Generator) -> np.ndarray:
        if self.dimension == 2:
            return perimeter_points(self._corners(), rng.uniform(0.0, 1.0, size=m))
        faces = self._faces()
        widths = self.upper - self.lower
        areas = np.array([np.prod(np.delete(widths, axis)) for axis, _ in faces])
        chosen = rng.choice(len(faces), size=m, p=areas / areas.sum())
        local = rng.uniform(0.0, 1.0, size=(m, self.dimension - 1))
        return np.asarray([self._face_point(*faces[f], local[i]) for i, f in enumerate(chosen)])

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}

    def _corners(self) -> np.ndarray:
        (x0, y0), (x1, y1) = self.lower, self.upper
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])

    def _faces(self):
        return [(axis, side) for axis in range(self.dimension) for side in (0, 1)]

    def _face_point(self, axis: int, side: int, local: np.ndarray) -> np.ndarray:
        """Point on a face from coordinates in [0, 1]^(d-1) along the remaining axes"""
        free = [a for a in range(self.dimension) if a != axis]
        point = np.empty(self.dimension)
        point[free] = self.lower[free] + local * (self.upper[free] - self.lower[free])
        point[axis] = self.upper[axis] if side else self.lower[axis]
        return point


class Ball(Domain):
    """Open ball of radius R centered at c"""

    def __init__(self, center: Sequence[float] = (0.0, 0.0), radius: float = 1.0):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        if self.center.ndim != 1 or self.center.shape[0] < 2:
            raise DomainError("ball center must be a vector of dimension at least 2")
        if not self.radius > 0.0:
            raise DomainError(f"ball radius must be positive, got {radius}")
        self.dimension = int(self.center.shape[0])

    @property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        reach = self.radius * (1.0 + BOX_MARGIN)
        return self.center - reach, self.center + reach

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = self._as_points(points)
        return np.linalg.norm(pts - self.center, axis=1) < self.radius

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        pts = self._as_points(points)
        return np.abs(np.linalg.norm(pts - self.center, axis=1) - self.radius)

    def equispaced_boundary(self, m: int) -> np.ndarray:
        if self.dimension == 2:
            angles = 2.0 * math.pi * np.arange(m) / m
            return self.center + self.radius * np.column_stack([np.cos(angles), np.sin(angles)])
        if self.dimension == 3:
            k = np.arange(m)
            z = 1.0 - (2.0 * k + 1.0) / m
            ring = np.sqrt(1.0 - z * z)
            theta = GOLDEN_ANGLE * k
            unit = np.column_stack([ring * np.cos(theta), ring * np.sin(theta), z])
            return self.center + self.radius * unit
        raise DomainError("equispaced ball boundaries are defined for d = 2 and d = 3 only")

    def random_boundary(self, m: int, rng: np.random.Generator) -> np.ndarray:
        directions = rng.standard_normal(size=(m, self.dimension))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        return self.center + self.radius * directions

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


class Polygon(Domain):
    """Simple polygon in the plane given by its vertex list.

    Membership uses the even-odd rule; self-intersecting vertex lists are not
    detected.
    """

    dimension = 2

    def __init__(self, vertices: Sequence[Sequence[float]]):
        self.vertices = np.asarray(vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise DimensionMismatchError("polygon vertices must be 2D points")
        if self.vertices.shape[0] < 3:
            raise DomainError("polygon needs at least 3 vertices")
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        area = 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
        if area == 0.0:
            raise DomainError("polygon has zero area")

    @property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        margin = BOX_MARGIN * (hi - lo)
        return lo - margin, hi + margin

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = self._as_points(points)
        x, y = pts[:, 0], pts[:, 1]
        inside = np.zeros(pts.shape[0], dtype=bool)
        xj, yj = self.vertices[-1]
        with np.errstate(divide="ignore", invalid="ignore"):
            for xi, yi in self.vertices:
                crosses = (yi > y) != (yj > y)
                x_cross = (xj - xi) * (y - yi) / (yj - yi) + xi
                inside ^= crosses & (x < x_cross)
                xj, yj = xi, yi
        return inside & (self.boundary_distance(pts) > 0.0)

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        pts = self._as_points(points)
        start = self.vertices
        seg = np.roll(self.vertices, -1, axis=0) - start
        rel = pts[:, None, :] - start[None, :, :]
        t = np.clip(np.einsum("pkd,kd->pk", rel, seg) / np.einsum("kd,kd->k", seg, seg), 0.0, 1.0)
        nearest = start[None, :, :] + t[:, :, None] * seg[None, :, :]
        return np.linalg.norm(pts[:, None, :] - nearest, axis=2).min(axis=1)

    def equispaced_boundary(self, m: int) -> np.ndarray:
        return perimeter_points(self.vertices, np.arange(m) / m)

    def random_boundary(self, m: int, rng: np.random.Generator) -> np.ndarray:
        return perimeter_points(self.vertices, rng.uniform(0.0, 1.0, size=m))

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "polygon", "vertices": self.vertices.tolist()}


def perimeter_points(vertices: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Points at arc-length fractions t in [0, 1) of a closed polygonal curve"""
    closed = np.vstack([vertices, vertices[:1]])
    segments = np.diff(closed, axis=0)
    lengths = np.linalg.norm(segments, axis=1)
    cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
    s = np.asarray(t, dtype=float) * cumulative[-1]
    idx = np.clip(np.searchsorted(cumulative, s, side="right") - 1, 0, len(lengths) - 1)
    frac = (s - cumulative[idx]) / lengths[idx]
    return closed[idx] + frac[:, None] * segments[idx]
