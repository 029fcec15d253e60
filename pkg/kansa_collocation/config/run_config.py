"""Schema of the JSON run configuration.

Every model forbids unknown keys; ``RunConfig.model_json_schema()`` is the
published schema printed by ``kansa schema``.
"""
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from kansa_collocation.geometry import Ball, BoundaryStrategy, Box, Density, Domain, Polygon
from kansa_collocation.kernels import KernelSpec


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BoxConfig(StrictModel):
    type: Literal["box"] = "box"
    lower: List[float] = Field(default_factory=lambda: [0.0, 0.0], min_length=2)
    upper: List[float] = Field(default_factory=lambda: [1.0, 1.0], min_length=2)

    @property
    def dimension(self) -> int:
        return len(self.lower)

    def build(self) -> Domain:
        return Box(self.lower, self.upper)


class BallConfig(StrictModel):
    type: Literal["ball"]
    center: List[float] = Field(default_factory=lambda: [0.0, 0.0], min_length=2)
    radius: float = Field(default=1.0, gt=0.0)

    @property
    def dimension(self) -> int:
        return len(self.center)

    def build(self) -> Domain:
        return Ball(self.center, self.radius)


class PolygonConfig(StrictModel):
    type: Literal["polygon"]
    vertices: List[Tuple[float, float]] = Field(min_length=3)

    @property
    def dimension(self) -> int:
        return 2

    def build(self) -> Domain:
        return Polygon(self.vertices)


DomainConfig = Annotated[Union[BoxConfig, BallConfig, PolygonConfig], Field(discriminator="type")]


class DensityConfig(StrictModel):
    kind: Literal["uniform", "gaussian"] = "uniform"
    center: Optional[List[float]] = None
    width: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _check_parameters(self) -> "DensityConfig":
        if self.kind == "gaussian" and (self.center is None or self.width is None):
            raise ValueError("gaussian density requires center and width")
        if self.kind == "uniform" and (self.center is not None or self.width is not None):
            raise ValueError("uniform density takes no parameters")
        return self

    def build(self) -> Density:
        if self.kind == "gaussian":
            return Density.gaussian_bump(self.center, self.width)
        return Density.uniform()


class BoundaryConfig(StrictModel):
    m: int = Field(default=16, ge=1)
    strategy: Literal["equispaced", "random", "user_list"] = "equispaced"
    seed: int = Field(default=0, ge=0)
    points: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _check_points(self) -> "BoundaryConfig":
        if (self.strategy == "user_list") != (self.points is not None):
            raise ValueError("points are required for, and only allowed with, the user_list strategy")
        if self.points is not None and len(self.points) != self.m:
            raise ValueError(f"user_list has {len(self.points)} points but m = {self.m}")
        return self

    def build(self) -> BoundaryStrategy:
        if self.strategy == "random":
            return BoundaryStrategy.random(self.seed)
        if self.strategy == "user_list":
            return BoundaryStrategy.user_list(self.points)
        return BoundaryStrategy.equispaced()


class InteriorConfig(StrictModel):
    n: int = Field(default=0, ge=0)


class ProblemConfig(StrictModel):
    name: Literal["zero", "constant", "manufactured_sine", "affine", "tabulated"] = "zero"
    value: float = 0.0
    slope: Optional[List[float]] = None
    offset: float = 0.0
    data_file: Optional[str] = None
    source: float = 0.0

    @model_validator(mode="after")
    def _check_parameters(self) -> "ProblemConfig":
        if self.name == "tabulated" and not self.data_file:
            raise ValueError("tabulated problem requires data_file")
        if self.name == "affine" and self.slope is None:
            raise ValueError("affine problem requires slope")
        return self


class SolveOptions(StrictModel):
    grid: int = Field(default=0, ge=0, description="evaluation grid points per axis; 0 disables the grid")


class McUnisolvenceConfig(StrictModel):
    name: Literal["mc_unisolvence"]
    trials: int = Field(default=100, ge=1)


class IncrementalGrowthConfig(StrictModel):
    name: Literal["incremental_growth"]
    n_max: int = Field(default=20, ge=0)


class FarfieldConfig(StrictModel):
    name: Literal["farfield"]
    radii: List[float] = Field(default_factory=lambda: [10.0, 20.0, 40.0], min_length=1)


class ConvergenceConfig(StrictModel):
    name: Literal["convergence"]
    schedule: List[Tuple[int, int]] = Field(min_length=1)
    test_points: int = Field(default=500, ge=1)


class EpsilonSweepConfig(StrictModel):
    name: Literal["epsilon_sweep"]
    epsilons: List[float] = Field(min_length=1)
    test_points: int = Field(default=200, ge=1)


class NearSingularConfig(StrictModel):
    name: Literal["near_singular"]
    restarts: int = Field(default=5, ge=1)
    steps: int = Field(default=100, ge=0)
    jitter: Optional[float] = Field(default=None, gt=0.0)


ExperimentConfig = Annotated[
    Union[
        McUnisolvenceConfig,
        IncrementalGrowthConfig,
        FarfieldConfig,
        ConvergenceConfig,
        EpsilonSweepConfig,
        NearSingularConfig,
    ],
    Field(discriminator="name"),
]


class RunConfig(StrictModel):
    kernel: KernelSpec
    domain: DomainConfig = Field(default_factory=BoxConfig)
    density: DensityConfig = Field(default_factory=DensityConfig)
    boundary: BoundaryConfig = Field(default_factory=BoundaryConfig)
    interior: InteriorConfig = Field(default_factory=InteriorConfig)
    problem: ProblemConfig = Field(default_factory=ProblemConfig)
    solve: SolveOptions = Field(default_factory=SolveOptions)
    experiment: Optional[ExperimentConfig] = None
    seed: int = Field(default=0, ge=0)
    output_dir: Optional[str] = None
