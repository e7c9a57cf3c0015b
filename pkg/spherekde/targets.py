# spherekde/targets.py
"""
von Mises-Fisher densities and mixtures on S^2, their exact samplers, and the
closed-form L2 functionals behind the oracle bandwidth and the MISE tables.

All functionals use the identity  integral over S^2 of e^{v.x} = 4 pi sinh|v| / |v|,
written through `scaled_sphere_exp_integral` so no exponent is positive.
"""

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.spatial.distance import cdist

from spherekde.errors import DomainError
from spherekde.estimator import FittedEstimator, Sample, evaluate, sq_norm, _default_quadrature
from spherekde.geometry import SphereQuadrature, UnitVector, normalize_rows, rotation_onto
from spherekde.utils.special import scaled_sphere_exp_integral

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-12
SMALL_KAPPA = 1e-8


def vmf_peak(kappa: float) -> float:
    """C_kappa e^kappa = kappa / (2 pi (1 - e^{-2 kappa})), the density at the mode."""
    if kappa < SMALL_KAPPA:
        return (1.0 + kappa + kappa * kappa / 3.0) / (4.0 * np.pi)
    return kappa / (2.0 * np.pi * -np.expm1(-2.0 * kappa))


def mean_resultant_length(kappa: float) -> float:
    """E[x.mu] = coth(kappa) - 1/kappa on S^2."""
    if kappa < 1e-4:
        return kappa / 3.0 - kappa**3 / 45.0
    return 1.0 / np.tanh(kappa) - 1.0 / kappa


@dataclass(frozen=True, eq=False)
class VmfComponent:
    kappa: float
    mu: UnitVector
    weight: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError(f"kappa must be > 0, got {self.kappa}")
        if not 0.0 < self.weight <= 1.0:
            raise DomainError(f"component weight must lie in (0, 1], got {self.weight}")
        mu = self.mu if isinstance(self.mu, UnitVector) else UnitVector(self.mu)
        if mu.d != 3:
            raise DomainError(f"von Mises-Fisher targets are defined on S^2, got d={mu.d}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "weight", float(self.weight))

    @property
    def peak(self) -> float:
        return vmf_peak(self.kappa)

    @property
    def normalizer(self) -> float:
        """C_kappa = kappa / (2 pi (e^kappa - e^{-kappa}))."""
        return self.peak * np.exp(-self.kappa)


@dataclass(frozen=True, eq=False)
class TargetDensity:
    components: tuple[VmfComponent, ...]
    name: str = "custom"

    def __post_init__(self):
        components = tuple(self.components)
        if not components:
            raise DomainError("a target density needs at least one component")
        total = sum(c.weight for c in components)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise DomainError(f"component weights sum to {total}, expected 1")
        object.__setattr__(self, "components", components)

    @property
    def d(self) -> int:
        return 3

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @property
    def kappas(self) -> np.ndarray:
        return np.array([c.kappa for c in self.components])

    @property
    def means(self) -> np.ndarray:
        return np.stack([c.mu.coords for c in self.components])

    @property
    def peaks(self) -> np.ndarray:
        return np.array([c.peak for c in self.components])


def f1vm() -> TargetDensity:
    return TargetDensity((VmfComponent(2.0, UnitVector([1.0, 0.0, 0.0]), 1.0),), name="f1vm")


def f2vm() -> TargetDensity:
    return TargetDensity(
        (
            VmfComponent(2.0, UnitVector([1.0, 0.0, 0.0]), 0.8),
            VmfComponent(0.7, UnitVector([-1.0, 0.0, 0.0]), 0.2),
        ),
        name="f2vm",
    )


TARGETS = {"f1vm": f1vm, "f2vm": f2vm}


def get_target(name: str) -> TargetDensity:
    try:
        return TARGETS[name.lower()]()
    except KeyError:
        raise DomainError(f"unknown target {name!r}; available: {sorted(TARGETS)}")


def target_from_components(components: Iterable, name: str = "custom") -> TargetDensity:
    """Build a mixture from [{kappa, mu: [x, y, z], weight}, ...] (dicts or pydantic models)."""
    entries = [item if isinstance(item, dict) else item.model_dump() for item in components]
    if not entries:
        raise DomainError("target has no components")
    weights = np.array([float(e.get("weight", 1.0)) for e in entries])
    if abs(weights.sum() - 1.0) > WEIGHT_TOLERANCE:
        raise DomainError(f"component weights sum to {weights.sum()}, expected 1")
    weights = weights / weights.sum()
    components = tuple(
        VmfComponent(float(e["kappa"]), UnitVector(e["mu"]), float(w)) for e, w in zip(entries, weights)
    )
    return TargetDensity(components, name=name)


def _component_gaps(points: np.ndarray, target: TargetDensity) -> np.ndarray:
    """(m, k) matrix of 1 - x.mu_k."""
    return 0.5 * cdist(points, target.means, "sqeuclidean")


def density(target: TargetDensity, x):
    """sum_k w_k C_k e^{kappa_k x.mu_k} at a UnitVector (float) or at the rows of an array."""
    points = x.coords[None, :] if isinstance(x, UnitVector) else normalize_rows(x)
    if points.shape[1] != target.d:
        raise DomainError(f"target lives on S^2, got points with d={points.shape[1]}")
    gaps = _component_gaps(points, target)
    values = np.exp(-gaps * target.kappas) @ (target.weights * target.peaks)
    return float(values[0]) if isinstance(x, UnitVector) else values


def sample(target: TargetDensity, n: int, seed: int | np.random.Generator) -> Sample:
    """n i.i.d. draws: component by weight, then w = x.mu by inverse CDF, uniform azimuth."""
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    labels = rng.choice(len(target.components), size=int(n), p=target.weights)
    u = rng.random(int(n))
    phi = rng.uniform(0.0, 2.0 * np.pi, int(n))

    points = np.empty((int(n), 3))
    for k, component in enumerate(target.components):
        mask = labels == k
        if not mask.any():
            continue
        kappa = component.kappa
        # w = 1 + log(u + (1 - u) e^{-2 kappa}) / kappa
        w = 1.0 + np.log1p((1.0 - u[mask]) * np.expm1(-2.0 * kappa)) / kappa
        w = np.clip(w, -1.0, 1.0)
        radius = np.sqrt(1.0 - w * w)
        local = np.stack([radius * np.cos(phi[mask]), radius * np.sin(phi[mask]), w], axis=1)
        points[mask] = local @ rotation_onto(component.mu).T
    return Sample(normalize_rows(points))


def _mixture_pair_sum(kappa_a, kappa_b, gaps) -> np.ndarray:
    """e^{-(ka+kb)} * integral of e^{x.(ka mu_a + kb mu_b)} from the gap 1 - mu_a.mu_b."""
    total = kappa_a + kappa_b
    product = kappa_a * kappa_b
    norms = np.sqrt(np.clip(total * total - 2.0 * product * gaps, 0.0, None))
    excess = 2.0 * product * gaps / (norms + total)
    return scaled_sphere_exp_integral(norms, excess, 3)


def exact_sq_norm(target: TargetDensity) -> float:
    """||f||^2 = sum_{k,l} w_k w_l C_k C_l 4 pi sinh|kappa_k mu_k + kappa_l mu_l| / |...|."""
    gaps = 0.5 * cdist(target.means, target.means, "sqeuclidean")
    kappas = target.kappas
    terms = _mixture_pair_sum(kappas[:, None], kappas[None, :], gaps)
    scaled = target.weights * target.peaks
    return float(scaled @ terms @ scaled)


def exact_inner(est: FittedEstimator, target: TargetDensity, quadrature: SphereQuadrature | None = None) -> float:
    """<f_hat_h, f>."""
    if est.d != target.d:
        raise DomainError(f"estimator has d={est.d}, target lives on S^2")
    if not est.closed_form:
        quadrature = quadrature or _default_quadrature(est.d)
        return quadrature.integrate(lambda nodes: evaluate(est, nodes) * density(target, nodes))
    a = 1.0 / est.h**2
    gaps = _component_gaps(est.sample.points, target)
    terms = _mixture_pair_sum(a, target.kappas[None, :], gaps)
    return est.c0_h / est.n * float(np.sum(terms @ (target.weights * target.peaks)))


def l2_risk(est: FittedEstimator, target: TargetDensity, target_sq_norm: float | None = None) -> float:
    """||f_hat_h - f||^2 from the exact functionals, clipped at zero."""
    norm = exact_sq_norm(target) if target_sq_norm is None else target_sq_norm
    return max(sq_norm(est) - 2.0 * exact_inner(est, target) + norm, 0.0)


def spot_check_risk(est: FittedEstimator, target: TargetDensity, quadrature: SphereQuadrature) -> float:
    """Quadrature value of ||f_hat_h - f||^2 (independent of the closed forms)."""
    return quadrature.integrate(lambda nodes: (evaluate(est, nodes) - density(target, nodes)) ** 2)
