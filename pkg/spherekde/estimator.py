# spherekde/estimator.py
"""
The directional kernel density estimator

    f_hat_h(x) = c0(h)/n * sum_i K((1 - x.X_i) / h^2)

and its exact L2 geometry. For the von Mises kernel every pairwise integral has
a closed form that depends on the pair only through the chord gap
g_ij = 1 - X_i.X_j = |X_i - X_j|^2 / 2, so a sample keeps the sorted gaps of
all pairs i < j once and every bandwidth reuses them. Other kernels fall back
to the product quadrature on S^2.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist, pdist

from spherekde import kernel as kernels
from spherekde.config import get_settings
from spherekde.errors import DomainError, InsufficientDataError
from spherekde.geometry import SphereQuadrature, UnitVector, normalize_rows, product_quadrature_s2
from spherekde.kernel import KernelProfile
from spherekde.utils.special import scaled_sphere_exp_integral

logger = logging.getLogger(__name__)

# Pairs whose stable exponent falls below -EXPONENT_CUTOFF contribute less than
# 1e-26 relative to the diagonal and are skipped.
EXPONENT_CUTOFF = 60.0
CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True, eq=False)
class PairwiseCache:
    """Ascending chord gaps 1 - X_i.X_j over all pairs i < j."""

    gaps: np.ndarray

    @classmethod
    def from_points(cls, points: np.ndarray) -> "PairwiseCache":
        gaps = np.sort(0.5 * pdist(points, "sqeuclidean"))
        gaps.flags.writeable = False
        return cls(gaps)

    def below(self, limit: float) -> np.ndarray:
        """Gaps <= limit (a prefix of the sorted array)."""
        return self.gaps[: np.searchsorted(self.gaps, limit, side="right")]


@dataclass(frozen=True, eq=False)
class Sample:
    """n points on S^{d-1}, optionally with the pairwise cache attached."""

    points: np.ndarray
    pairwise: PairwiseCache | None = None

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 1:
            raise InsufficientDataError("a sample needs at least one point")
        if points.shape[1] < 3:
            raise DomainError(f"points must live on S^(d-1) with d >= 3, got d={points.shape[1]}")
        points.flags.writeable = False
        object.__setattr__(self, "points", points)

    @classmethod
    def from_points(cls, raw, with_cache: bool = False) -> "Sample":
        sample = cls(normalize_rows(raw))
        return sample.with_pairwise_cache() if with_cache else sample

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def with_pairwise_cache(self) -> "Sample":
        if self.pairwise is not None:
            return self
        return replace(self, pairwise=PairwiseCache.from_points(self.points))

    def gaps(self) -> np.ndarray:
        cache = self.pairwise if self.pairwise is not None else PairwiseCache.from_points(self.points)
        return cache.gaps

    def resultant_lengths(self) -> np.ndarray:
        """n x n matrix of |X_i + X_j| (2 on the diagonal)."""
        gap_matrix = 0.5 * cdist(self.points, self.points, "sqeuclidean")
        np.fill_diagonal(gap_matrix, 0.0)
        return np.sqrt(np.clip(4.0 - 2.0 * gap_matrix, 0.0, 4.0))

    def without(self, i: int) -> "Sample":
        return Sample(np.delete(self.points, i, axis=0))


@dataclass(frozen=True, eq=False)
class FittedEstimator:
    sample: Sample
    kernel: KernelProfile
    h: float
    c0_h: float

    @property
    def n(self) -> int:
        return self.sample.n

    @property
    def d(self) -> int:
        return self.sample.d

    @property
    def closed_form(self) -> bool:
        return self.kernel.is_von_mises


def fit(sample: Sample, K: KernelProfile, h: float) -> FittedEstimator:
    return FittedEstimator(sample=sample, kernel=K, h=float(h), c0_h=kernels.c0(K, h, sample.d))


def _as_points(x, d: int) -> np.ndarray:
    if isinstance(x, UnitVector):
        points = x.coords[None, :]
    else:
        points = normalize_rows(x)
    if points.shape[1] != d:
        raise DomainError(f"evaluation points have d={points.shape[1]}, sample has d={d}")
    return points


def _kernel_sum(est: FittedEstimator, points: np.ndarray, support: np.ndarray) -> np.ndarray:
    """sum_j K((1 - x.X_j)/h^2) for every row x, in blocks of about CHUNK_ELEMENTS."""
    out = np.empty(points.shape[0])
    rows = max(1, CHUNK_ELEMENTS // max(support.shape[0], 1))
    for start in range(0, points.shape[0], rows):
        block = points[start:start + rows]
        gap = 0.5 * cdist(block, support, "sqeuclidean")
        out[start:start + rows] = est.kernel(gap / est.h**2).sum(axis=1)
    return out


def evaluate(est: FittedEstimator, x):
    """f_hat_h at a UnitVector (returns a float) or at the rows of an (m, d) array."""
    points = _as_points(x, est.d)
    values = est.c0_h / est.n * _kernel_sum(est, points, est.sample.points)
    return float(values[0]) if isinstance(x, UnitVector) else values


def loo_evaluate(est: FittedEstimator, i: int, x):
    """Leave-one-out estimate without X_i, normalized by n - 1."""
    if est.n < 2:
        raise InsufficientDataError("leave-one-out evaluation needs n >= 2")
    if not 0 <= i < est.n:
        raise DomainError(f"index {i} out of range for n={est.n}")
    points = _as_points(x, est.d)
    rest = np.delete(est.sample.points, i, axis=0)
    values = est.c0_h / (est.n - 1) * _kernel_sum(est, points, rest)
    return float(values[0]) if isinstance(x, UnitVector) else values


def loo_self_sum(est: FittedEstimator) -> float:
    """sum_i f_hat_{h,i}(X_i), from the pairwise gaps."""
    if est.n < 2:
        raise InsufficientDataError("leave-one-out evaluation needs n >= 2")
    a = 1.0 / est.h**2
    gaps = est.sample.gaps()
    if est.sample.pairwise is not None:
        gaps = est.sample.pairwise.below(est.kernel.tail_cutoff / a)
    return est.c0_h / (est.n - 1) * 2.0 * float(est.kernel(a * gaps).sum())


def _pair_sum(sample: Sample, a: float, b: float) -> float:
    """sum_{i,j} e^{-(a+b)} * integral of e^{x.(a X_i + b X_j)} over S^{d-1}."""
    total = a + b
    product = a * b
    if sample.pairwise is not None:
        gaps = sample.pairwise.below(EXPONENT_CUTOFF * total / product)
    else:
        gaps = sample.gaps()
    # |a X_i + b X_j| = sqrt((a+b)^2 - 2ab g); its deficit from a+b is 2ab g / (s + a + b)
    norms = np.sqrt(np.clip(total * total - 2.0 * product * gaps, 0.0, None))
    excess = 2.0 * product * gaps / (norms + total)
    off_diagonal = scaled_sphere_exp_integral(norms, excess, sample.d)
    diagonal = scaled_sphere_exp_integral(total, 0.0, sample.d)
    return sample.n * diagonal + 2.0 * float(np.sum(off_diagonal))


def _default_quadrature(d: int) -> SphereQuadrature:
    if d != 3:
        raise DomainError(f"quadrature fallback covers S^2 only; got d={d} with a non-von-Mises kernel")
    settings = get_settings()
    return product_quadrature_s2(settings.quad_nt, settings.quad_nphi)


def integrate(est: FittedEstimator, quadrature: SphereQuadrature | None = None, power: int = 1) -> float:
    """Quadrature of f_hat_h^power over S^2."""
    quadrature = quadrature or _default_quadrature(est.d)
    return quadrature.integrate(lambda nodes: evaluate(est, nodes) ** power)


def sq_norm(est: FittedEstimator, quadrature: SphereQuadrature | None = None) -> float:
    """||f_hat_h||^2."""
    if est.closed_form:
        a = 1.0 / est.h**2
        return est.c0_h**2 / est.n**2 * _pair_sum(est.sample, a, a)
    logger.debug("sq_norm: quadrature fallback for kernel %s", est.kernel.name)
    return integrate(est, quadrature, power=2)


def _check_compatible(est_h: FittedEstimator, est_h2: FittedEstimator) -> None:
    same_sample = est_h.sample is est_h2.sample or (
        est_h.sample.points.shape == est_h2.sample.points.shape
        and np.array_equal(est_h.sample.points, est_h2.sample.points)
    )
    if not same_sample:
        raise DomainError("estimators were fitted on different samples")
    if est_h.kernel is not est_h2.kernel:
        raise DomainError("estimators use different kernels")


def inner_product(est_h: FittedEstimator, est_h2: FittedEstimator, quadrature: SphereQuadrature | None = None) -> float:
    """<f_hat_h, f_hat_h2> for two estimators on the same sample and kernel."""
    _check_compatible(est_h, est_h2)
    if est_h.closed_form:
        a, b = 1.0 / est_h.h**2, 1.0 / est_h2.h**2
        return est_h.c0_h * est_h2.c0_h / est_h.n**2 * _pair_sum(est_h.sample, a, b)
    quadrature = quadrature or _default_quadrature(est_h.d)
    return quadrature.integrate(lambda nodes: evaluate(est_h, nodes) * evaluate(est_h2, nodes))


def diff_sq_norm(est_h: FittedEstimator, est_h2: FittedEstimator, quadrature: SphereQuadrature | None = None) -> float:
    """||f_hat_h - f_hat_h2||^2, clipped at zero."""
    _check_compatible(est_h, est_h2)
    if est_h.h == est_h2.h:
        return 0.0
    if not est_h.closed_form:
        quadrature = quadrature or _default_quadrature(est_h.d)
        return quadrature.integrate(lambda nodes: (evaluate(est_h, nodes) - evaluate(est_h2, nodes)) ** 2)
    value = sq_norm(est_h) + sq_norm(est_h2) - 2.0 * inner_product(est_h, est_h2)
    return max(value, 0.0)
