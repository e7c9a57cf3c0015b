# spherekde/selectors.py
"""
Bandwidth selection over the grid H = {1/m : 1 <= m <= m_max}.

SPCO minimizes the distance to the most overfitting estimator f_hat_{h_min}
plus a penalty,

    crit_lambda(h) = ||f_hat_h - f_hat_{h_min}||^2 + pen_lambda(h),
    pen_lambda(h)  = (lambda - 1) v(h) - v(h_min) + 2 x(h),

with v(h) = c0(h)^2 c2(h) / n and x(h) = c0(h) c0(h_min) <K_h, K_{h_min}> / n.
CV2 is least-squares cross-validation and the oracle minimizes the true L2
risk against a known density. All three break ties toward the larger h.
"""

import logging
from dataclasses import dataclass

import numpy as np

from spherekde import kernel as kernels
from spherekde.errors import ConfigurationError, DomainError, InsufficientDataError
from spherekde.estimator import (
    FittedEstimator,
    Sample,
    diff_sq_norm,
    fit,
    inner_product,
    loo_self_sum,
    sq_norm,
)
from spherekde.kernel import KernelProfile
from spherekde.schemas import CriterionRow, SelectionReport
from spherekde.targets import TargetDensity, exact_inner, exact_sq_norm

logger = logging.getLogger(__name__)

# Guards floor() against n R0 / |K| landing a rounding error below a perfect power.
GRID_EPSILON = 1e-12


@dataclass(frozen=True, eq=False)
class BandwidthGrid:
    n: int
    d: int
    kernel: KernelProfile
    m_max: int

    @property
    def inverse_range(self) -> np.ndarray:
        return np.arange(1, self.m_max + 1)

    @property
    def bandwidths(self) -> np.ndarray:
        """Ascending: 1/m_max, ..., 1/2, 1."""
        return 1.0 / np.arange(self.m_max, 0, -1)

    @property
    def h_min(self) -> float:
        return 1.0 / self.m_max

    def __len__(self) -> int:
        return self.m_max

    def index_of(self, h: float) -> int:
        """Position of h in `bandwidths`; DomainError if h is not a grid point."""
        if not 0.0 < h <= 1.0:
            raise DomainError(f"bandwidth {h} is not in the grid (1/m, m <= {self.m_max})")
        m = int(round(1.0 / h))
        if m < 1 or m > self.m_max or abs(h * m - 1.0) > 1e-9:
            raise DomainError(f"bandwidth {h} is not in the grid (1/m, m <= {self.m_max})")
        return self.m_max - m


def build_grid(n: int, d: int, K: KernelProfile) -> BandwidthGrid:
    """m_max = floor((n R0(K) / |K|_inf)^{1/(d-1)})."""
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n}")
    constants = kernels.kernel_constants(K, d)
    ratio = n * constants.R0 / K.sup_norm
    m_max = int(np.floor(ratio ** (1.0 / (d - 1)) * (1.0 + GRID_EPSILON)))
    if m_max < 1:
        raise ConfigurationError(
            f"empty bandwidth grid for n={n}, d={d}, kernel {K.name!r}: need n >= {K.sup_norm / constants.R0:.4g}"
        )
    logger.debug("Bandwidth grid for n=%d, d=%d: m_max=%d, h_min=%.6f", n, d, m_max, 1.0 / m_max)
    return BandwidthGrid(n=int(n), d=int(d), kernel=K, m_max=m_max)


def variance_term(K: KernelProfile, h: float, n: int, d: int = 3) -> float:
    """v(h) = c0(h)^2 c2(h) / n."""
    return kernels.c0(K, h, d) ** 2 * kernels.c2(K, h, d) / n


def _cross_term(K: KernelProfile, h: float, h_min: float, n: int, d: int) -> float:
    return kernels.c0(K, h, d) * kernels.c0(K, h_min, d) * kernels.cross_inner(K, h, h_min, d) / n


def penalty(h: float, grid: BandwidthGrid, lam: float = 1.0) -> float:
    grid.index_of(h)
    K, n, d, h_min = grid.kernel, grid.n, grid.d, grid.h_min
    return (
        (lam - 1.0) * variance_term(K, h, n, d)
        - variance_term(K, h_min, n, d)
        + 2.0 * _cross_term(K, h, h_min, n, d)
    )


def criterion_argmin(bandwidths, values) -> float:
    """Bandwidth at the minimum of `values`; exact ties go to the largest h."""
    bandwidths = np.asarray(bandwidths, dtype=float)
    values = np.asarray(values, dtype=float)
    if bandwidths.size == 0 or bandwidths.shape != values.shape:
        raise DomainError("criterion table is empty or misaligned")
    if not np.all(np.isfinite(values)):
        raise DomainError("criterion table contains non-finite values")
    tied = np.flatnonzero(values == values.min())
    return float(bandwidths[tied].max())


def _resolve_grid(sample: Sample, K: KernelProfile, grid: BandwidthGrid | None) -> BandwidthGrid:
    if grid is None:
        return build_grid(sample.n, sample.d, K)
    if grid.n != sample.n or grid.d != sample.d or grid.kernel is not K:
        raise DomainError("bandwidth grid was built for a different sample size, dimension or kernel")
    return grid


def fit_grid(sample: Sample, K: KernelProfile, grid: BandwidthGrid) -> list[FittedEstimator]:
    return [fit(sample, K, h) for h in grid.bandwidths]


def grid_sq_norms(estimators: list[FittedEstimator]) -> np.ndarray:
    """||f_hat_h||^2 along the grid; shared by the three selectors."""
    return np.array([sq_norm(est) for est in estimators])


@dataclass(frozen=True, eq=False)
class SpcoComponents:
    """The lambda-independent pieces of the SPCO criterion along one grid."""

    grid: BandwidthGrid
    diff: np.ndarray
    variance: np.ndarray
    cross: np.ndarray

    def penalty(self, lam: float = 1.0) -> np.ndarray:
        return (lam - 1.0) * self.variance - self.variance[0] + 2.0 * self.cross

    def criterion(self, lam: float = 1.0) -> np.ndarray:
        return self.diff + self.penalty(lam)

    def select(self, lam: float = 1.0) -> float:
        return criterion_argmin(self.grid.bandwidths, self.criterion(lam))


def spco_components(
    sample: Sample,
    K: KernelProfile,
    grid: BandwidthGrid | None = None,
    estimators: list[FittedEstimator] | None = None,
    sq_norms: np.ndarray | None = None,
) -> SpcoComponents:
    grid = _resolve_grid(sample, K, grid)
    estimators = estimators or fit_grid(sample, K, grid)
    overfit = estimators[0]

    if overfit.closed_form:
        sq_norms = grid_sq_norms(estimators) if sq_norms is None else sq_norms
        inners = np.array([inner_product(est, overfit) for est in estimators])
        diff = np.clip(sq_norms + sq_norms[0] - 2.0 * inners, 0.0, None)
        diff[0] = 0.0
    else:
        diff = np.array([diff_sq_norm(est, overfit) for est in estimators])

    n, d, h_min = sample.n, sample.d, grid.h_min
    variance = np.array([variance_term(K, h, n, d) for h in grid.bandwidths])
    cross = np.array([_cross_term(K, h, h_min, n, d) for h in grid.bandwidths])
    return SpcoComponents(grid=grid, diff=diff, variance=variance, cross=cross)


def _report(method, grid, values, diagnostics, lam=None, seed=None) -> SelectionReport:
    bandwidths = grid.bandwidths
    return SelectionReport(
        method=method,
        lam=lam,
        chosen_h=criterion_argmin(bandwidths, values),
        h_min=grid.h_min,
        n=grid.n,
        d=grid.d,
        kernel=grid.kernel.name,
        seed=seed,
        table=[CriterionRow(h=float(h), value=float(v)) for h, v in zip(bandwidths, values)],
        diagnostics={key: [float(x) for x in val] for key, val in diagnostics.items()},
    )


def spco_select(
    sample: Sample,
    K: KernelProfile,
    lam: float = 1.0,
    grid: BandwidthGrid | None = None,
    components: SpcoComponents | None = None,
    seed: int | None = None,
) -> SelectionReport:
    """argmin over H of ||f_hat_h - f_hat_{h_min}||^2 + pen_lambda(h); lambda = 1 is tuning-free."""
    components = components or spco_components(sample, K, grid)
    values = components.criterion(lam)
    report = _report(
        "SPCO",
        components.grid,
        values,
        {"penalty": components.penalty(lam), "diff_sq_norm": components.diff},
        lam=float(lam),
        seed=seed,
    )
    logger.debug("SPCO (lambda=%g) chose h=%.6f on %d bandwidths", lam, report.chosen_h, len(components.grid))
    return report


def cv2_values(estimators: list[FittedEstimator], sq_norms: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """CV2(h) = ||f_hat_h||^2 - (2/n) sum_i f_hat_{h,i}(X_i), plus the leave-one-out sums."""
    sq_norms = grid_sq_norms(estimators) if sq_norms is None else sq_norms
    loo = np.array([loo_self_sum(est) for est in estimators])
    n = estimators[0].n
    return sq_norms - 2.0 / n * loo, loo


def cv2_select(
    sample: Sample,
    K: KernelProfile,
    grid: BandwidthGrid | None = None,
    estimators: list[FittedEstimator] | None = None,
    sq_norms: np.ndarray | None = None,
    seed: int | None = None,
) -> SelectionReport:
    if sample.n < 2:
        raise InsufficientDataError("CV2 needs at least two points")
    grid = _resolve_grid(sample, K, grid)
    estimators = estimators or fit_grid(sample, K, grid)
    sq_norms = grid_sq_norms(estimators) if sq_norms is None else sq_norms
    values, loo = cv2_values(estimators, sq_norms)
    report = _report("CV2", grid, values, {"sq_norm": sq_norms, "loo_sum": loo}, seed=seed)
    logger.debug("CV2 chose h=%.6f", report.chosen_h)
    return report


def oracle_values(
    estimators: list[FittedEstimator],
    target: TargetDensity | FittedEstimator,
    sq_norms: np.ndarray | None = None,
    target_sq_norm: float | None = None,
) -> tuple[np.ndarray, float]:
    """||f_hat_h - f||^2 along the grid and ||f||^2.

    `target` is a known density or, for degenerate checks, another estimator on
    the same sample.
    """
    if isinstance(target, FittedEstimator):
        inners = np.array([inner_product(est, target) for est in estimators])
        norm = sq_norm(target) if target_sq_norm is None else target_sq_norm
    elif isinstance(target, TargetDensity):
        inners = np.array([exact_inner(est, target) for est in estimators])
        norm = exact_sq_norm(target) if target_sq_norm is None else target_sq_norm
    else:
        raise DomainError(f"oracle target must be a TargetDensity with a density, got {type(target).__name__}")
    sq_norms = grid_sq_norms(estimators) if sq_norms is None else sq_norms
    return sq_norms - 2.0 * inners + norm, norm


def oracle_select(
    sample: Sample,
    K: KernelProfile,
    target: TargetDensity | FittedEstimator,
    grid: BandwidthGrid | None = None,
    estimators: list[FittedEstimator] | None = None,
    sq_norms: np.ndarray | None = None,
    seed: int | None = None,
) -> SelectionReport:
    """argmin over H of the true squared L2 risk ||f_hat_h - f||^2."""
    if target is None:
        raise DomainError("oracle selection needs a target density")
    grid = _resolve_grid(sample, K, grid)
    estimators = estimators or fit_grid(sample, K, grid)
    risks, norm = oracle_values(estimators, target, sq_norms)
    report = _report("Oracle", grid, risks, {"shifted_risk": risks - norm}, seed=seed)
    logger.debug("Oracle chose h=%.6f", report.chosen_h)
    return report
