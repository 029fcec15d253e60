"""Special functions needed by the Matern kernel.

``gamma`` is a Lanczos approximation. ``bessel_k`` evaluates the modified Bessel
function of the second kind K_nu(x) for real order nu >= 0 (negative orders are
reduced with K_{-nu} = K_nu):

* half-integer orders use the elementary closed form
  K_{1/2}(x) = sqrt(pi / (2x)) e^{-x}, carried upward by the recurrence;
* any other order is split as nu = mu + k with mu in [-1/2, 1/2). The pair
  (K_mu, K_{mu+1}) comes from Temme's series for x <= SERIES_SWITCH, from Steed's
  continued fraction (Temme's method) up to ASYMPTOTIC_SWITCH and from the Hankel
  asymptotic expansion beyond it. The forward recurrence
  K_{v+1}(x) = K_{v-1}(x) + (2v/x) K_v(x) then climbs k orders.

All Bessel routines accept a scalar or a numpy array for ``x``; a scalar argument
returns a Python float.
"""
import math
from typing import Tuple, Union

import numpy as np

from kansa_collocation.exceptions import BesselOverflowError, ConvergenceError, DomainError

ArrayLike = Union[float, np.ndarray]

EPS = float(np.finfo(float).eps)
SERIES_SWITCH = 2.0
ASYMPTOTIC_SWITCH = 25.0
MAX_ITERATIONS = 10000

_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# Taylor coefficients of 1/Gamma(1 + z) = sum_i c_i z^i
_RECIPROCAL_GAMMA_COEFFS = (
    1.0000000000000000,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
)


def gamma(x: float) -> float:
    """Gamma function for x > 0"""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    if x == math.floor(x) and x <= 171.0:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        # reflection keeps the Lanczos sum in its accurate range
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))

    z = x - 1.0
    series = _LANCZOS_COEFFS[0]
    for i, coeff in enumerate(_LANCZOS_COEFFS[1:], start=1):
        series += coeff / (z + i)
    t = z + _LANCZOS_G + 0.5
    half_power = t ** (0.5 * (z + 0.5))
    return math.sqrt(2.0 * math.pi) * half_power * (half_power * math.exp(-t)) * series


def bessel_k(nu: float, x: ArrayLike) -> ArrayLike:
    """Modified Bessel function of the second kind K_nu(x), x > 0"""
    x_arr, scalar = _prepare(x)
    k_nu, _ = _pair(abs(float(nu)), x_arr)
    return _finish(k_nu, scalar, nu)


def bessel_k_general(nu: float, x: ArrayLike) -> ArrayLike:
    """K_nu(x) through the general-order path, bypassing the half-integer closed form"""
    x_arr, scalar = _prepare(x)
    k_nu, _ = _general_pair(abs(float(nu)), x_arr)
    return _finish(k_nu, scalar, nu)


def bessel_k_dv_pair(nu: float, x: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """Return (K_{nu-1}(x), K_{nu-2}(x)), the lower orders used by the Matern Laplacian.

    For nu >= 2 both values come out of a single recurrence run started at
    order nu - 2; below that at least one order is negative and the symmetry
    K_{-v} = K_v is applied to each separately.
    """
    x_arr, scalar = _prepare(x)
    nu = float(nu)
    if nu >= 2.0:
        k_nu_m2, k_nu_m1 = _pair(nu - 2.0, x_arr)
    else:
        k_nu_m1, _ = _pair(abs(nu - 1.0), x_arr)
        k_nu_m2, _ = _pair(abs(nu - 2.0), x_arr)
    return _finish(k_nu_m1, scalar, nu - 1.0), _finish(k_nu_m2, scalar, nu - 2.0)


def is_half_integer(nu: float) -> bool:
    """True when nu = k + 1/2 for an integer k >= 0"""
    twice = 2.0 * nu
    return twice >= 1.0 and twice == math.floor(twice) and int(twice) % 2 == 1


def _prepare(x: ArrayLike) -> Tuple[np.ndarray, bool]:
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    if not np.all(x_arr > 0.0):
        raise DomainError("bessel_k requires x > 0")
    return x_arr, scalar


def _finish(values: np.ndarray, scalar: bool, nu: float) -> ArrayLike:
    if not np.all(np.isfinite(values)):
        raise BesselOverflowError(f"K_{nu}(x) overflows for the smallest requested x")
    if scalar:
        return float(values[0])
    return values


def _pair(order: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(K_order, K_{order+1}) for order >= 0"""
    if is_half_integer(order):
        return _half_integer_pair(order, x)
    return _general_pair(order, x)


def _half_integer_pair(order: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    k_half = np.sqrt(math.pi / (2.0 * x)) * np.exp(-x)
    return _recur_upward(0.5, int(round(order - 0.5)), x, k_half, k_half * (1.0 + 1.0 / x))


def _general_pair(order: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    shift = int(math.floor(order + 0.5))
    mu = order - shift
    k_mu, k_mu1 = _base_pair(mu, x)
    return _recur_upward(mu, shift, x, k_mu, k_mu1)


def _recur_upward(
    order: float, steps: int, x: np.ndarray, k_lo: np.ndarray, k_hi: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Advance (K_order, K_{order+1}) by `steps` orders"""
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, steps + 1):
            k_lo, k_hi = k_hi, (order + i) * (2.0 / x) * k_hi + k_lo
    return k_lo, k_hi


def _base_pair(mu: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(K_mu, K_{mu+1}) for mu in [-1/2, 1/2)"""
    k_mu = np.empty_like(x)
    k_mu1 = np.empty_like(x)
    small = x <= SERIES_SWITCH
    large = x >= ASYMPTOTIC_SWITCH
    middle = ~(small | large)
    if small.any():
        k_mu[small], k_mu1[small] = _temme_series(mu, x[small])
    if middle.any():
        k_mu[middle], k_mu1[middle] = _steed_continued_fraction(mu, x[middle])
    if large.any():
        k_mu[large] = _hankel_asymptotic(mu, x[large])
        k_mu1[large] = _hankel_asymptotic(mu + 1.0, x[large])
    return k_mu, k_mu1


def _temme_gammas(mu: float) -> Tuple[float, float, float, float]:
    """Return gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu).

    gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) and
    gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2, both free of cancellation at mu -> 0.
    """
    even = 0.0
    odd = 0.0
    for i, coeff in enumerate(_RECIPROCAL_GAMMA_COEFFS):
        if i % 2 == 0:
            even += coeff * mu**i
        else:
            odd += coeff * mu ** (i - 1)
    return -odd, even, even + mu * odd, even - mu * odd


def _temme_series(mu: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    half_x = 0.5 * x
    pi_mu = math.pi * mu
    fact = pi_mu / math.sin(pi_mu) if abs(pi_mu) > EPS else 1.0
    log_term = -np.log(half_x)
    e = mu * log_term
    tiny = np.abs(e) <= EPS
    safe_e = np.where(tiny, 1.0, e)
    fact2 = np.where(tiny, 1.0, np.sinh(safe_e) / safe_e)
    gam1, gam2, rgamma_plus, rgamma_minus = _temme_gammas(mu)

    ff = fact * (gam1 * np.cosh(e) + gam2 * fact2 * log_term)
    total = ff.copy()
    exp_e = np.exp(e)
    p = 0.5 * exp_e / rgamma_plus
    q = 0.5 / (exp_e * rgamma_minus)
    c = np.ones_like(x)
    quarter_x2 = half_x * half_x
    total1 = p.copy()
    for i in range(1, MAX_ITERATIONS):
        ff = (i * ff + p + q) / (i * i - mu * mu)
        c = c * quarter_x2 / i
        p = p / (i - mu)
        q = q / (i + mu)
        delta = c * ff
        total = total + delta
        total1 = total1 + c * (p - i * ff)
        if np.all(np.abs(delta) < np.abs(total) * EPS):
            break
    else:
        raise ConvergenceError(f"Temme series for K_{mu} did not converge")
    return total, total1 * (2.0 / x)


def _steed_continued_fraction(mu: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25 - mu * mu
    q = np.full_like(x, a1)
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, MAX_ITERATIONS):
        a -= 2.0 * i
        c = -a * c / (i + 1.0)
        q_next = (q1 - b * q2) / a
        q1 = q2
        q2 = q_next
        q = q + c * q_next
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels / s) < EPS):
            break
    else:
        raise ConvergenceError(f"continued fraction for K_{mu} did not converge")
    h = a1 * h
    k_mu = np.sqrt(math.pi / (2.0 * x)) * np.exp(-x) / s
    k_mu1 = k_mu * (mu + x + 0.5 - h) / x
    return k_mu, k_mu1


def _hankel_asymptotic(order: float, x: np.ndarray) -> np.ndarray:
    four_nu2 = 4.0 * order * order
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 200):
        term = term * (four_nu2 - (2.0 * k - 1.0) ** 2) / (8.0 * k * x)
        total = total + term
        if np.all(np.abs(term) <= EPS * np.abs(total)):
            break
    return np.sqrt(math.pi / (2.0 * x)) * np.exp(-x) * total
