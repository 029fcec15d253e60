import json

import numpy as np
import pytest

from kansa_collocation.geometry import Ball, BoundaryStrategy, Box, CollocationSet, Density, sample_boundary, sample_interior
from kansa_collocation.kernels import KernelSpec

KANSA_ENV = ("KANSA_CONFIG_PATH", "KANSA_OUTPUT_DIR", "KANSA_THREADS", "KANSA_LOG_LEVEL")


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch, tmp_path):
    """Run every test from an empty directory with no KANSA_* variables set"""
    for name in KANSA_ENV:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def unit_square():
    return Box.unit(2)


@pytest.fixture
def unit_disk():
    return Ball((0.0, 0.0), 1.0)


@pytest.fixture
def gaussian():
    return KernelSpec(family="gaussian", epsilon=1.0)


# well-conditioned settings for the unit square
ADMISSIBLE_SPECS = [
    KernelSpec(family="gaussian", epsilon=5.0),
    KernelSpec(family="gimq", beta=-0.5, epsilon=3.0),
    KernelSpec(family="gimq", beta=-1.0, epsilon=3.0),
    KernelSpec(family="matern", nu=2.5, epsilon=3.0),
    KernelSpec(family="matern", nu=1.5, epsilon=3.0),
]


def make_colloc(domain, n, m, seed=0, density=None):
    boundary = sample_boundary(domain, m, BoundaryStrategy.equispaced())
    interior = sample_interior(domain, density or Density.uniform(), n, seed)
    return CollocationSet(interior, boundary)


@pytest.fixture
def write_config(tmp_path):
    """Write a run configuration dict to JSON and return its path"""

    def write(data, name="run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write


def random_orthogonal(size, seed):
    q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((size, size)))
    return q
