"""Kansa linear system and solve results"""
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from kansa_collocation.exceptions import DimensionMismatchError


@dataclass
class Coefficients:
    """Weights of the interior-centered (c) and boundary-centered (d) basis functions"""
    c: np.ndarray
    d: np.ndarray

    @classmethod
    def from_vector(cls, x: np.ndarray, n: int) -> "Coefficients":
        x = np.asarray(x, dtype=float)
        return cls(c=x[:n].copy(), d=x[n:].copy())

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.c, self.d])

    def check_lengths(self, n: int, m: int) -> None:
        if self.c.shape[0] != n or self.d.shape[0] != m:
            raise DimensionMismatchError(
                f"coefficients have lengths ({self.c.shape[0]}, {self.d.shape[0]}), expected ({n}, {m})"
            )

    def to_rows(self):
        rows = [("interior", j, float(v)) for j, v in enumerate(self.c)]
        rows += [("boundary", k, float(v)) for k, v in enumerate(self.d)]
        return rows


@dataclass
class KansaSystem:
    """N x N collocation matrix with its right-hand side.

    Rows 0..n-1 are PDE rows at the interior points, rows n..N-1 boundary rows;
    columns follow the same split between interior and boundary centers.
    """
    matrix: np.ndarray
    rhs: np.ndarray
    n: int
    m: int

    @property
    def size(self) -> int:
        return self.n + self.m

    @property
    def boundary_block(self) -> np.ndarray:
        """The interpolation matrix V_m"""
        return self.matrix[self.n:, self.n:]

    @property
    def pde_block(self) -> np.ndarray:
        return self.matrix[: self.n, : self.n]


@dataclass
class SolveReport:
    coefficients: Coefficients
    sigma_min: float
    sigma_max: float
    cond2: float
    residual_inf: float
    singular_flag: bool
    pivot_growth: float = float("nan")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigma_min": self.sigma_min,
            "sigma_max": self.sigma_max,
            "cond2": self.cond2,
            "residual_inf": self.residual_inf,
            "pivot_growth": self.pivot_growth,
            "singular_flag": self.singular_flag,
            "n": int(self.coefficients.c.shape[0]),
            "m": int(self.coefficients.d.shape[0]),
        }
