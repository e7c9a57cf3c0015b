# spherekde/kernel.py
"""
Kernel profiles K on [0, inf) and the constants the directional estimator needs.

Every sphere integral of a zonal kernel reduces to one dimension through the
decomposition y = t x + (1 - t^2)^{1/2} xi:

    integral over S^{d-1} of K((1 - x.y)/h^2) dy
        = sigma_{d-2} * integral_{-1}^{1} K((1 - t)/h^2) (1 - t^2)^{(d-3)/2} dt.

With t = 1 - h^2 u this becomes sigma_{d-2} h^{d-1} * integral_0^{2/h^2}
K(u) (u (2 - h^2 u))^{(d-3)/2} du, which keeps the integrand O(1) as h -> 0.
The von Mises kernel K(x) = e^{-x} has closed forms for all of these.
"""

import logging
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special

from spherekde.errors import DomainError, MomentError
from spherekde.geometry import surface_area
from spherekde.utils.special import scaled_sphere_exp_integral

logger = logging.getLogger(__name__)

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 500
# Accept a quad result that raised IntegrationWarning only if its error estimate is this small.
QUAD_ACCEPT_RELERR = 1e-9
TAIL_LEVEL = 1e-16
PROBE_GRID = np.concatenate([[0.0], np.geomspace(1e-8, 1e4, 2000)])


class KernelFamily(str, Enum):
    VON_MISES = "VonMises"
    GENERIC = "Generic"


@dataclass(frozen=True, eq=False)
class KernelProfile:
    """Nonnegative bounded profile K with its sup-norm and numeric support."""

    name: str
    profile: Callable[[np.ndarray], np.ndarray]
    sup_norm: float
    tail_cutoff: float
    family: KernelFamily = KernelFamily.GENERIC

    def __call__(self, x):
        return np.asarray(self.profile(np.asarray(x, dtype=float)), dtype=float)

    @property
    def is_von_mises(self) -> bool:
        return self.family is KernelFamily.VON_MISES


@dataclass(frozen=True)
class KernelConstants:
    d: int
    alpha0: float
    R0: float
    R1: float

    @property
    def R(self) -> float:
        """R(K) = R1 / R0^2, the limit of c0^2(h) c2(h) h^{d-1}."""
        return self.R1 / self.R0**2


def _quad(func: Callable[[float], float], a: float, b: float, what: str) -> float:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, abserr = integrate.quad(
            func, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT
        )
    if not np.isfinite(value):
        raise MomentError(f"{what}: integral is not finite")
    if caught and abserr > QUAD_ACCEPT_RELERR * max(abs(value), QUAD_EPSABS):
        raise MomentError(f"{what}: quadrature did not converge ({caught[0].message})")
    return float(value)


def _probe_tail(profile: Callable, sup_norm: float) -> float:
    """First power of two beyond which every probed value is below TAIL_LEVEL * sup_norm."""
    probes = 2.0 ** np.arange(0, 61)
    small = np.asarray(profile(probes), dtype=float) < TAIL_LEVEL * sup_norm
    if not small[-1]:
        raise DomainError("kernel profile does not decay below 1e-16 * sup_norm before 2^60")
    # last probe that is still above the level
    large = np.flatnonzero(~small)
    return float(probes[large[-1] + 1]) if large.size else float(probes[0])


def make_kernel(
    profile: Callable[[np.ndarray], np.ndarray],
    name: str = "generic",
    sup_norm: float | None = None,
    tail_cutoff: float | None = None,
    family: KernelFamily = KernelFamily.GENERIC,
) -> KernelProfile:
    """Validate a profile and wrap it as a KernelProfile.

    Probes the profile for nonnegativity, infers sup_norm and tail_cutoff when
    omitted, and checks 0 < alpha_0(K) < inf in d = 3.
    """
    values = np.asarray(profile(PROBE_GRID), dtype=float)
    if values.shape != PROBE_GRID.shape or not np.all(np.isfinite(values)):
        raise DomainError(f"kernel {name!r} must be vectorized and finite on [0, inf)")
    if np.any(values < 0):
        raise DomainError(f"kernel {name!r} takes negative values")
    probe_max = float(values.max())
    if sup_norm is None:
        sup_norm = probe_max
    elif sup_norm < probe_max:
        raise DomainError(f"sup_norm {sup_norm} is below the probed maximum {probe_max}")
    if sup_norm <= 0:
        raise DomainError(f"kernel {name!r} vanishes identically")
    if tail_cutoff is None:
        tail_cutoff = _probe_tail(profile, sup_norm)

    kernel = KernelProfile(name, profile, float(sup_norm), float(tail_cutoff), family)
    alpha0 = alpha_moment(kernel, 0, 3)
    if not alpha0 > 0:
        raise MomentError(f"kernel {name!r} has alpha_0 = {alpha0}, expected > 0")
    return kernel


def _von_mises_profile(x: np.ndarray) -> np.ndarray:
    with np.errstate(under="ignore"):
        return np.exp(-x)


@lru_cache(maxsize=1)
def von_mises_kernel() -> KernelProfile:
    """K(x) = e^{-x}."""
    return KernelProfile(
        name="vonmises",
        profile=_von_mises_profile,
        sup_norm=1.0,
        tail_cutoff=64.0,
        family=KernelFamily.VON_MISES,
    )


KERNELS = {"vonmises": von_mises_kernel}


def get_kernel(name: str) -> KernelProfile:
    try:
        return KERNELS[name.lower()]()
    except KeyError:
        raise DomainError(f"unknown kernel {name!r}; available: {sorted(KERNELS)}")


def _check_dimension(d: int) -> None:
    if int(d) != d or d < 3:
        raise DomainError(f"kernel constants need an integer d >= 3, got {d}")


def _check_bandwidth(h: float) -> None:
    if not 0.0 < h <= 1.0:
        raise DomainError(f"bandwidth must lie in (0, 1], got {h}")


def alpha_moment(K: KernelProfile, i: int, d: int) -> float:
    """alpha_i(K) = integral_0^inf x^{(i+d-3)/2} K(x) dx."""
    if int(i) != i or i < 0 or i % 2:
        raise DomainError(f"moment index must be an even integer >= 0, got {i}")
    _check_dimension(d)
    power = 0.5 * (i + d - 3)
    if K.is_von_mises:
        return float(special.gamma(power + 1.0))

    def integrand(x):
        return x**power * float(K(x))

    what = f"alpha_{i}({K.name}) in d={d}"
    body = _quad(integrand, 0.0, K.tail_cutoff, what)
    tail = _quad(integrand, K.tail_cutoff, np.inf, what)
    return body + tail


def kernel_constants(K: KernelProfile, d: int) -> KernelConstants:
    _check_dimension(d)
    scale = 2.0 ** (0.5 * (d - 3)) * surface_area(d - 1)
    alpha0 = alpha_moment(K, 0, d)
    power = 0.5 * (d - 3)
    if K.is_von_mises:
        squared = float(special.gamma(power + 1.0) / 2.0 ** (power + 1.0))
    else:
        squared = _quad(
            lambda x: x**power * float(K(x)) ** 2, 0.0, K.tail_cutoff, f"R1({K.name}) in d={d}"
        )
    return KernelConstants(d=int(d), alpha0=alpha0, R0=scale * alpha0, R1=scale * squared)


def _zonal_integral(product: Callable[[float], float], h: float, d: int, upper: float, what: str) -> float:
    """sigma_{d-2} h^{d-1} * integral_0^{upper} product(u) (u (2 - h^2 u))^{(d-3)/2} du."""
    power = 0.5 * (d - 3)
    upper = min(upper, 2.0 / h**2)
    h2 = h * h

    if power == 0.0:
        integrand = product
    else:
        def integrand(u):
            return product(u) * (u * max(2.0 - h2 * u, 0.0)) ** power

    return surface_area(d - 1) * h ** (d - 1) * _quad(integrand, 0.0, upper, what)


@lru_cache(maxsize=4096)
def _generic_inner(K: KernelProfile, h: float, h2: float, d: int) -> float:
    small, large = min(h, h2), max(h, h2)
    ratio = (small / large) ** 2

    def product(u):
        return float(K(u)) * float(K(u * ratio))

    return _zonal_integral(product, small, d, K.tail_cutoff, f"<K_h, K_h2>({K.name}, {h}, {h2})")


@lru_cache(maxsize=4096)
def _generic_mass(K: KernelProfile, h: float, d: int) -> float:
    return _zonal_integral(lambda u: float(K(u)), h, d, K.tail_cutoff, f"1/c0({K.name}, {h})")


def c0(K: KernelProfile, h: float, d: int = 3) -> float:
    """Normalizer making f_hat_h integrate to one."""
    _check_bandwidth(h)
    _check_dimension(d)
    if K.is_von_mises:
        return 1.0 / scaled_sphere_exp_integral(1.0 / h**2, 0.0, d)
    return 1.0 / _generic_mass(K, float(h), int(d))


def cross_inner(K: KernelProfile, h: float, h2: float, d: int = 3) -> float:
    """<K_{h^2}(x, .), K_{h2^2}(x, .)> over S^{d-1}, without c0 factors."""
    _check_bandwidth(h)
    _check_bandwidth(h2)
    _check_dimension(d)
    if K.is_von_mises:
        return scaled_sphere_exp_integral(1.0 / h**2 + 1.0 / h2**2, 0.0, d)
    return _generic_inner(K, float(h), float(h2), int(d))


def c2(K: KernelProfile, h: float, d: int = 3) -> float:
    """Integral over S^{d-1} of K^2((1 - x.y)/h^2) dy."""
    return cross_inner(K, h, h, d)
