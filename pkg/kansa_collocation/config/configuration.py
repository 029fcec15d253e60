"""Configuration management for Kansa collocation runs"""
import json
import logging
import os
from typing import Any, Dict, Optional

import numpy as np
from dotenv import load_dotenv
from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from kansa_collocation import problems
from kansa_collocation.exceptions import ConfigurationError
from kansa_collocation.geometry import BoundaryStrategy, Density, Domain
from kansa_collocation.kernels import KernelSpec
from kansa_collocation.problems import PoissonProblem

from .run_config import RunConfig

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = os.path.join("config", "run_config.json")
DEFAULT_OUTPUT_DIR = "results"


class KansaSettings(BaseSettings):
    """Environment defaults, read from KANSA_* variables and .env"""

    model_config = SettingsConfigDict(env_prefix="KANSA_", extra="ignore")

    config_path: str = DEFAULT_CONFIG_PATH
    output_dir: Optional[str] = None
    threads: Optional[int] = Field(default=None, ge=1)
    log_level: str = "INFO"


class Configuration:
    """Loads a run configuration file and applies command-line overrides.

    Precedence: explicit arguments, then the configuration file, then KANSA_*
    environment defaults. The output directory falls back to "results".
    """

    def __init__(
        self,
        config_path: Optional[str] = None,
        seed: Optional[int] = None,
        output_dir: Optional[str] = None,
        threads: Optional[int] = None,
    ):
        load_dotenv()
        try:
            self.settings = KansaSettings()
        except ValidationError as e:
            raise ConfigurationError(f"KANSA_* environment: {_describe(e)}") from e
        if seed is not None and seed < 0:
            raise ConfigurationError(f"--seed must be nonnegative, got {seed}")
        if threads is not None and threads < 1:
            raise ConfigurationError(f"--threads must be at least 1, got {threads}")
        self.config_path = config_path or self.settings.config_path
        self.config = self._load_config(self.config_path)
        self._seed = seed
        self._output_dir = output_dir
        self._threads = threads
        logger.debug("loaded configuration from %s", self.config_path)

    def _load_config(self, path: str) -> RunConfig:
        """Load and validate configuration from a JSON file"""
        try:
            with open(path, "r") as f:
                raw = json.load(f)
        except FileNotFoundError as e:
            raise ConfigurationError(f"configuration file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
        try:
            return RunConfig.model_validate(raw)
        except ValidationError as e:
            raise ConfigurationError(f"{path}: {_describe(e)}") from e

    @property
    def run(self) -> RunConfig:
        return self.config

    @property
    def seed(self) -> int:
        return self._seed if self._seed is not None else self.config.seed

    @property
    def output_dir(self) -> str:
        return self._output_dir or self.config.output_dir or self.settings.output_dir or DEFAULT_OUTPUT_DIR

    @property
    def threads(self) -> Optional[int]:
        return self._threads or self.settings.threads

    @property
    def log_level(self) -> str:
        return self.settings.log_level.upper()

    @property
    def kernel(self) -> KernelSpec:
        return self.config.kernel

    @property
    def dimension(self) -> int:
        return self.config.domain.dimension

    def build_domain(self) -> Domain:
        return self._build(self.config.domain.build)

    def build_density(self) -> Density:
        return self._build(self.config.density.build)

    def build_boundary_strategy(self) -> BoundaryStrategy:
        return self._build(self.config.boundary.build)

    def build_problem(self) -> PoissonProblem:
        spec = self.config.problem
        domain = self.build_domain()
        if spec.name == "zero":
            return problems.zero(domain)
        if spec.name == "constant":
            return problems.constant(domain, spec.value)
        if spec.name == "manufactured_sine":
            return self._build(lambda: problems.manufactured_sine(domain))
        if spec.name == "affine":
            return self._build(lambda: problems.affine(domain, spec.slope, spec.offset))
        points, values = self._load_table(spec.data_file, domain.dimension)
        return self._build(lambda: problems.tabulated(domain, points, values, spec.source))

    def resolved(self) -> Dict[str, Any]:
        """Full configuration with overrides applied, for output metadata"""
        data = self.config.model_dump(mode="json")
        data["seed"] = self.seed
        data["output_dir"] = self.output_dir
        return data

    def _load_table(self, data_file: str, dimension: int):
        """Read a tabulated CSV with header x1,..,xd,value; relative paths follow the config file"""
        path = data_file
        if not os.path.isabs(path):
            path = os.path.join(os.path.dirname(os.path.abspath(self.config_path)), path)
        try:
            with open(path, "r") as f:
                header = f.readline().strip().split(",")
            table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        except (OSError, ValueError) as e:
            raise ConfigurationError(f"cannot read tabulated data {path}: {e}") from e
        expected = [f"x{i + 1}" for i in range(dimension)] + ["value"]
        if header != expected:
            raise ConfigurationError(f"{path}: header must be {','.join(expected)}, got {','.join(header)}")
        return table[:, :dimension], table[:, dimension]

    @staticmethod
    def _build(factory):
        try:
            return factory()
        except (ValueError, ArithmeticError) as e:
            raise ConfigurationError(str(e)) from e


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)
