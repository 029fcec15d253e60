from .collocation import BOUNDARY, INTERIOR, CollocationSet
from .domains import Ball, Box, Domain, Polygon
from .sampling import (
    BoundaryStrategy,
    BoundaryStrategyKind,
    Density,
    DensityKind,
    ensure_distinct,
    min_separation,
    sample_boundary,
    sample_interior,
)

__all__ = [
    "BOUNDARY",
    "INTERIOR",
    "Ball",
    "BoundaryStrategy",
    "BoundaryStrategyKind",
    "Box",
    "CollocationSet",
    "Density",
    "DensityKind",
    "Domain",
    "Polygon",
    "ensure_distinct",
    "min_separation",
    "sample_boundary",
    "sample_interior",
]
