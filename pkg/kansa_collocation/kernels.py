"""Radial basis function kernels: Gaussian, Generalized Inverse MultiQuadric and Matern.

Every family is described by an unscaled radial profile phi(rho) and its radial
Laplacian profile ell_d(rho) = phi''(rho) + (d - 1) phi'(rho) / rho. The kernel with
shape parameter epsilon is phi(epsilon * r) and its Laplacian is
epsilon^2 * ell_d(epsilon * r).
"""
import functools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.spatial.distance import cdist

from kansa_collocation.exceptions import DimensionMismatchError, DomainError
from kansa_collocation.specfun import bessel_k, bessel_k_dv_pair, gamma

ArrayLike = Union[float, np.ndarray]

DECAY_RADII = (10.0, 20.0, 40.0, 80.0)
CONTINUITY_RADII = (1e-2, 1e-4, 1e-6)
CONTINUITY_TOLERANCE = 0.1


class KernelFamily(str, Enum):
    GAUSSIAN = "gaussian"
    GIMQ = "gimq"
    MATERN = "matern"


class RadialProfile(ABC):
    """Unscaled radial function phi(rho) with the derivatives the Laplacian needs"""

    @abstractmethod
    def phi(self, rho: ArrayLike) -> ArrayLike:
        ...

    @abstractmethod
    def dphi(self, rho: ArrayLike) -> ArrayLike:
        ...

    @abstractmethod
    def ddphi(self, rho: ArrayLike) -> ArrayLike:
        ...

    @abstractmethod
    def ell(self, d: int, rho: ArrayLike) -> ArrayLike:
        """Radial Laplacian profile in dimension d, continuous at rho = 0"""

    @abstractmethod
    def ell0(self, d: int) -> float:
        ...


class GaussianProfile(RadialProfile):
    """phi(rho) = exp(-rho^2)"""

    def phi(self, rho: ArrayLike) -> ArrayLike:
        rho, scalar = _as_radii(rho)
        return _unwrap(np.exp(-rho * rho), scalar)

    def dphi(self, rho: ArrayLike) -> ArrayLike:
        rho, scalar = _as_radii(rho)
        return _unwrap(-2.0 * rho * np.exp(-rho * rho), scalar)

    def ddphi(self, rho: ArrayLike) -> ArrayLike:
        rho, scalar = _as_radii(rho)
        return _unwrap((4.0 * rho * rho - 2.0) * np.exp(-rho * rho), scalar)

    def ell(self, d: int, rho: ArrayLike) -> ArrayLike:
        rho, scalar = _as_radii(rho)
        return _unwrap((4.0 * rho * rho - 2.0 * d) * np.exp(-rho * rho), scalar)

    def ell0(self, d: int) -> float:
        return -2.0 * d


class GimqProfile(RadialProfile):
    """phi(rho) = (1 + rho^2)^beta with beta < 0"""

    def __init__(self, beta: float):
        self.beta = beta

    def phi(self, rho: ArrayLike) -> ArrayLike:
        rho, scalar = _as_radii(rho)
        return _unwrap((1.0 + rho * rho) ** self.beta, scalar)

    def dphi(self, rho: ArrayLike) -> ArrayLike:
        rho, scalar = _as_radii(rho)
        return _unwrap(2.0 * self.beta * rho * (1.0 + rho * rho) ** (self.beta - 1.0), scalar)

    def ddphi(self, rho: ArrayLike) -> ArrayLike:
        rho, scalar = _as_radii(rho)
        beta = self.beta
        base = 1.0 + rho * rho
        return _unwrap(2.0 * beta * base ** (beta - 2.0) * (1.0 + (2.0 * beta - 1.0) * rho * rho), scalar)

    def ell(self, d: int, rho: ArrayLike) -> ArrayLike:
        rho, scalar = _as_radii(rho)
        beta = self.beta
        base = 1.0 + rho * rho
        bracket = d + (d + 2.0 * beta - 2.0) * rho * rho
        return _unwrap(2.0 * beta * base ** (beta - 2.0) * bracket, scalar)

    def ell0(self, d: int) -> float:
        return 2.0 * self.beta * d


class MaternProfile(RadialProfile):
    """phi(rho) = 2^(1-nu) / Gamma(nu) * rho^nu * K_nu(rho) with nu > 1.

    Below series_radius the regular part of the small-argument expansion,
    phi = 1 + a rho^2 + b rho^4, replaces the Bessel product. The radius is at
    least SMALL_ARGUMENT and grows with nu so that K_nu(rho) and rho^nu never
    overflow or underflow; the singular rho^(2 nu) terms are negligible there.
    """

    SMALL_ARGUMENT = 1e-8
    LOG_LARGEST = 690.0
    OVERFLOW_MARGIN = 10.0

    def __init__(self, nu: float):
        self.nu = nu
        self.scale = 2.0 ** (1.0 - nu) / gamma(nu)
        log_peak = (nu - 1.0) * math.log(2.0) + math.log(gamma(nu))
        overflow_radius = math.exp((log_peak - self.LOG_LARGEST) / nu)
        self.series_radius = max(self.SMALL_ARGUMENT, self.OVERFLOW_MARGIN * overflow_radius)
        self.a = -0.25 / (nu - 1.0)
        self.b = 1.0 / (32.0 * (nu - 1.0) * (nu - 2.0)) if nu >= 3.0 else 0.0

    def phi(self, rho: ArrayLike) -> ArrayLike:
        rho, scalar = _as_radii(rho)
        near = rho < self.series_radius
        r2 = rho[near] ** 2
        out = np.empty_like(rho)
        out[near] = 1.0 + r2 * (self.a + self.b * r2)
        if not near.all():
            r = rho[~near]
            out[~near] = self.scale * r**self.nu * bessel_k(self.nu, r)
        return _unwrap(out, scalar)

    def dphi(self, rho: ArrayLike) -> ArrayLike:
        rho, scalar = _as_radii(rho)
        near = rho < self.series_radius
        r = rho[near]
        out = np.empty_like(rho)
        out[near] = r * (2.0 * self.a + 4.0 * self.b * r**2)
        if not near.all():
            r = rho[~near]
            k_nu_m1, _ = bessel_k_dv_pair(self.nu, r)
            out[~near] = -self.scale * r**self.nu * k_nu_m1
        return _unwrap(out, scalar)

    def ddphi(self, rho: ArrayLike) -> ArrayLike:
        return self._combine(1, rho)

    def ell(self, d: int, rho: ArrayLike) -> ArrayLike:
        return self._combine(d, rho)

    def ell0(self, d: int) -> float:
        return -d / (2.0 * (self.nu - 1.0))

    def _combine(self, weight: int, rho: ArrayLike) -> ArrayLike:
        """-scale * (weight * rho^(nu-1) K_{nu-1} - rho^nu K_{nu-2})"""
        rho, scalar = _as_radii(rho)
        near = rho < self.series_radius
        out = np.empty_like(rho)
        out[near] = 2.0 * self.a * weight + (4.0 * weight + 8.0) * self.b * rho[near] ** 2
        if not near.all():
            r = rho[~near]
            k_nu_m1, k_nu_m2 = bessel_k_dv_pair(self.nu, r)
            r_pow = r ** (self.nu - 1.0)
            out[~near] = -self.scale * (weight * r_pow * k_nu_m1 - r * r_pow * k_nu_m2)
        return _unwrap(out, scalar)


class KernelSpec(BaseModel):
    """Kernel family, family parameter and shape parameter epsilon"""

    model_config = ConfigDict(frozen=True, extra="forbid", use_enum_values=False)

    family: KernelFamily
    epsilon: float = Field(gt=0.0, allow_inf_nan=False)
    beta: Optional[float] = Field(default=None, allow_inf_nan=False)
    nu: Optional[float] = Field(default=None, allow_inf_nan=False)

    @model_validator(mode="after")
    def _check_family_parameters(self) -> "KernelSpec":
        if self.family is KernelFamily.GIMQ:
            if self.beta is None:
                raise ValueError("gimq kernel requires beta")
            if self.beta >= 0.0:
                raise ValueError(f"gimq kernel requires beta < 0, got {self.beta}")
        elif self.beta is not None:
            raise ValueError(f"beta is only valid for the gimq family, not {self.family.value}")

        if self.family is KernelFamily.MATERN:
            if self.nu is None:
                raise ValueError("matern kernel requires nu")
            if self.nu <= 1.0:
                raise ValueError(f"matern kernel requires nu > 1, got {self.nu}")
        elif self.nu is not None:
            raise ValueError(f"nu is only valid for the matern family, not {self.family.value}")
        return self

    @property
    def profile(self) -> RadialProfile:
        return _profile_for(self.family, self.beta, self.nu)

    @property
    def label(self) -> str:
        """Short name used in output file names"""
        if self.family is KernelFamily.GIMQ:
            return f"gimq{self.beta:g}"
        if self.family is KernelFamily.MATERN:
            return f"matern{self.nu:g}"
        return self.family.value

    def with_epsilon(self, epsilon: float) -> "KernelSpec":
        return KernelSpec(family=self.family, epsilon=epsilon, beta=self.beta, nu=self.nu)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True)


@functools.lru_cache(maxsize=None)
def _profile_for(family: KernelFamily, beta: Optional[float], nu: Optional[float]) -> RadialProfile:
    if family is KernelFamily.GAUSSIAN:
        return GaussianProfile()
    if family is KernelFamily.GIMQ:
        return GimqProfile(beta)
    profile = MaternProfile(nu)
    if not math.isfinite(profile.ell0(2)):
        raise DomainError(f"matern order {nu} gives a non-finite Laplacian at the center")
    return profile


def phi(spec: KernelSpec, r: ArrayLike) -> ArrayLike:
    """Scaled kernel profile phi(epsilon * r)"""
    return spec.profile.phi(spec.epsilon * np.asarray(r, dtype=float))


def ell(spec: KernelSpec, d: int, r: ArrayLike) -> ArrayLike:
    """Unscaled Laplacian profile ell_d evaluated at rho = epsilon * r"""
    _check_dimension(d)
    return spec.profile.ell(d, spec.epsilon * np.asarray(r, dtype=float))


def ell0(spec: KernelSpec, d: int) -> float:
    """Limit of ell_d at the center, without the epsilon^2 factor"""
    _check_dimension(d)
    return spec.profile.ell0(d)


def eval_kernel(spec: KernelSpec, center: Sequence[float], p: Sequence[float]) -> float:
    center_arr, p_arr = _point_pair(center, p)
    return float(phi(spec, np.linalg.norm(p_arr - center_arr)))


def eval_laplacian(spec: KernelSpec, d: int, center: Sequence[float], p: Sequence[float]) -> float:
    """Laplacian of the kernel centered at `center`, evaluated at p"""
    center_arr, p_arr = _point_pair(center, p)
    if center_arr.shape[0] != d:
        raise DimensionMismatchError(f"points have dimension {center_arr.shape[0]}, expected {d}")
    return spec.epsilon**2 * float(ell(spec, d, np.linalg.norm(p_arr - center_arr)))


def kernel_matrix(spec: KernelSpec, points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Matrix (phi_eps(|points_i - centers_j|))"""
    return np.asarray(phi(spec, _distances(points, centers)))


def laplacian_matrix(spec: KernelSpec, points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Matrix of kernel Laplacians (Delta phi_{centers_j}(points_i))"""
    d = np.asarray(points).shape[1]
    return spec.epsilon**2 * np.asarray(ell(spec, d, _distances(points, centers)))


@dataclass
class AdmissibilityCheck:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class AdmissibilityReport:
    """Numerical checks of decay, continuity and non-vanishing Laplacian at the center"""

    spec: KernelSpec
    dimension: int
    checks: List[AdmissibilityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kernel": self.spec.to_dict(),
            "dimension": self.dimension,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
        }


def admissibility_report(spec: KernelSpec, d: int) -> AdmissibilityReport:
    """Decay of phi and ell at rho in DECAY_RADII, ell(0) != 0 and continuity of ell at 0"""
    _check_dimension(d)
    report = AdmissibilityReport(spec=spec, dimension=d)
    radii = np.array(DECAY_RADII) / spec.epsilon

    phi_values = np.asarray(phi(spec, radii))
    report.checks.append(
        AdmissibilityCheck(
            name="phi_decay",
            passed=_shrinks_toward_zero(phi_values),
            detail=f"|phi| at rho={DECAY_RADII}: {_format_values(phi_values)}",
        )
    )

    ell_values = np.asarray(ell(spec, d, radii))
    report.checks.append(
        AdmissibilityCheck(
            name="ell_decay",
            passed=_shrinks_toward_zero(ell_values),
            detail=f"|ell| at rho={DECAY_RADII}: {_format_values(ell_values)}",
        )
    )

    center_value = ell0(spec, d)
    report.checks.append(
        AdmissibilityCheck(
            name="ell0_nonzero",
            passed=math.isfinite(center_value) and center_value != 0.0,
            detail=f"ell(0) = {center_value!r}",
        )
    )

    near = np.array(CONTINUITY_RADII) / spec.epsilon
    gaps = np.abs(np.asarray(ell(spec, d, near)) - center_value)
    slack = 4.0 * np.finfo(float).eps * abs(center_value)
    settling = all(b <= a + slack for a, b in zip(gaps[:-1], gaps[1:]))
    report.checks.append(
        AdmissibilityCheck(
            name="ell_continuity",
            passed=bool(settling and gaps[-1] <= CONTINUITY_TOLERANCE * abs(center_value)),
            detail=f"|ell(rho) - ell(0)| at rho={CONTINUITY_RADII}: {_format_values(gaps)}",
        )
    )
    return report


def _shrinks_toward_zero(values: np.ndarray) -> bool:
    """Magnitudes strictly decrease until they underflow to zero, and end below the start"""
    mags = np.abs(values)
    if not np.all(np.isfinite(mags)):
        return False
    for a, b in zip(mags[:-1], mags[1:]):
        if not (b < a or (a == 0.0 and b == 0.0)):
            return False
    return bool(mags[-1] < mags[0])


def _format_values(values: np.ndarray) -> str:
    return "[" + ", ".join(f"{v:.3e}" for v in np.abs(values)) + "]"


def _as_radii(rho: ArrayLike) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(rho, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr < 0.0):
        raise DomainError("radial argument must be nonnegative")
    return arr, scalar


def _unwrap(values: np.ndarray, scalar: bool) -> ArrayLike:
    if scalar:
        return float(values.reshape(-1)[0])
    return values


def _check_dimension(d: int) -> None:
    if d < 2:
        raise DomainError(f"dimension must be at least 2, got {d}")


def _point_pair(center: Sequence[float], p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    center_arr = np.asarray(center, dtype=float).reshape(-1)
    p_arr = np.asarray(p, dtype=float).reshape(-1)
    if center_arr.shape != p_arr.shape:
        raise DimensionMismatchError(
            f"center has dimension {center_arr.shape[0]} but point has dimension {p_arr.shape[0]}"
        )
    return center_arr, p_arr


def _distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if points.shape[1] != centers.shape[1]:
        raise DimensionMismatchError(
            f"points have dimension {points.shape[1]} but centers have dimension {centers.shape[1]}"
        )
    if points.shape[0] == 0 or centers.shape[0] == 0:
        return np.zeros((points.shape[0], centers.shape[0]))
    return cdist(points, centers)
