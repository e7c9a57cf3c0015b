# spherekde/bench/experiments.py
"""
Monte-Carlo experiments over seeded replications.

Every replication draws its own sample (seed = base_seed + rep), builds the
pairwise cache once and evaluates the exact risk of every grid bandwidth, so
the risk of any selected bandwidth is a table lookup and the oracle dominates
the other selectors replication by replication. Replications run through
joblib and are gathered in order, so reports do not depend on worker count.
"""

import logging
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed

from spherekde import targets
from spherekde.config import resolve_workers
from spherekde.estimator import FittedEstimator, Sample, evaluate, fit
from spherekde.geometry import lat_long_mesh, product_quadrature_s2
from spherekde.kernel import get_kernel
from spherekde.schemas import (
    BenchConfig,
    LambdaSweepReport,
    LambdaSweepRow,
    MethodSummary,
    MiseReport,
    QuadratureCheck,
    RateReport,
    RateRow,
    ReconstructionReport,
    ReconstructionRow,
    RiskCurveRow,
    RiskCurvesReport,
)
from spherekde.selectors import (
    BandwidthGrid,
    SpcoComponents,
    build_grid,
    criterion_argmin,
    cv2_values,
    fit_grid,
    grid_sq_norms,
    oracle_values,
    spco_components,
)
from spherekde.targets import TargetDensity

logger = logging.getLogger(__name__)

# Relative disagreement between exact and quadrature risk worth a warning.
QUADRATURE_WARN_RELERR = 1e-6


def resolve_target(config: BenchConfig) -> TargetDensity:
    if config.target is not None:
        return targets.target_from_components(config.target, name="custom")
    return targets.get_target(config.target_id)


@dataclass(frozen=True)
class ReplicationOutcome:
    seed: int
    chosen_h: dict[str, float]
    risk: dict[str, float]
    sweep_h: tuple[float, ...] = ()
    sweep_risk: tuple[float, ...] = ()


@dataclass
class GridEvaluation:
    """Everything one sample contributes to the three criteria."""

    sample: Sample
    grid: BandwidthGrid
    estimators: list[FittedEstimator]
    sq_norms: np.ndarray
    risks: np.ndarray
    target_sq_norm: float
    components: SpcoComponents | None = None
    cv2: np.ndarray | None = None


def evaluate_grid(
    target: TargetDensity, n: int, seed: int, kernel_name: str = "vonmises", spco: bool = True, cv2: bool = True
) -> GridEvaluation:
    K = get_kernel(kernel_name)
    sample = targets.sample(target, n, seed).with_pairwise_cache()
    grid = build_grid(n, sample.d, K)
    estimators = fit_grid(sample, K, grid)
    sq_norms = grid_sq_norms(estimators)
    risks, norm = oracle_values(estimators, target, sq_norms)
    evaluation = GridEvaluation(sample, grid, estimators, sq_norms, risks, norm)
    if spco:
        evaluation.components = spco_components(sample, K, grid, estimators, sq_norms)
    if cv2:
        evaluation.cv2 = cv2_values(estimators, sq_norms)[0]
    return evaluation


def run_replication(
    target: TargetDensity,
    n: int,
    seed: int,
    kernel_name: str = "vonmises",
    methods: Sequence[str] = ("Oracle", "SPCO", "CV2"),
    lam: float = 1.0,
    lambdas: Sequence[float] = (),
) -> ReplicationOutcome:
    evaluation = evaluate_grid(
        target, n, seed, kernel_name, spco="SPCO" in methods or bool(lambdas), cv2="CV2" in methods
    )
    grid, risks = evaluation.grid, evaluation.risks
    bandwidths = grid.bandwidths

    chosen = {}
    for method in methods:
        if method == "Oracle":
            chosen[method] = criterion_argmin(bandwidths, risks)
        elif method == "SPCO":
            chosen[method] = evaluation.components.select(lam)
        elif method == "CV2":
            chosen[method] = criterion_argmin(bandwidths, evaluation.cv2)
    risk = {method: float(risks[grid.index_of(h)]) for method, h in chosen.items()}

    sweep_h = tuple(evaluation.components.select(value) for value in lambdas)
    sweep_risk = tuple(float(risks[grid.index_of(h)]) for h in sweep_h)
    return ReplicationOutcome(seed, chosen, risk, sweep_h, sweep_risk)


def _replicate(config: BenchConfig, target: TargetDensity, n: int, workers: int | None, **kwargs) -> list[ReplicationOutcome]:
    seeds = [config.base_seed + rep for rep in range(config.reps)]
    n_jobs = resolve_workers(workers if workers is not None else config.workers)
    logger.info("🔁 %d replications of n=%d on %s (n_jobs=%s)", config.reps, n, target.name, n_jobs)
    return Parallel(n_jobs=n_jobs)(
        delayed(run_replication)(target, n, seed, config.kernel, **kwargs) for seed in seeds
    )


def _mean_and_error(values: Sequence[float]) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


def _quadrature_check(config: BenchConfig, target: TargetDensity, outcome: ReplicationOutcome) -> QuadratureCheck:
    method = next((m for m in config.methods if m != "Oracle"), config.methods[0])
    h = outcome.chosen_h[method]
    sample = targets.sample(target, config.n, outcome.seed)
    est = fit(sample, get_kernel(config.kernel), h)
    quadrature = product_quadrature_s2(config.quad_nt, config.quad_nphi)
    quad_risk = targets.spot_check_risk(est, target, quadrature)
    exact = outcome.risk[method]
    diff = abs(quad_risk - exact)
    if diff > QUADRATURE_WARN_RELERR * max(exact, 1e-300):
        logger.warning("⚠️ Quadrature spot check for %s at h=%.4f differs by %.3e (exact %.6e)", method, h, diff, exact)
    else:
        logger.info("✅ Quadrature spot check for %s at h=%.4f agrees (diff %.3e)", method, h, diff)
    return QuadratureCheck(rep=0, method=method, h=h, exact_risk=exact, quadrature_risk=quad_risk, abs_diff=diff)


def run_mise(config: BenchConfig, workers: int | None = None) -> MiseReport:
    """Mean integrated squared error of each selector over config.reps replications."""
    logger.info("🚀 run_mise started: target=%s n=%d reps=%d", config.target_id, config.n, config.reps)
    started = time.perf_counter()
    target = resolve_target(config)
    grid = build_grid(config.n, target.d, get_kernel(config.kernel))
    outcomes = _replicate(config, target, config.n, workers, methods=tuple(config.methods), lam=config.lam)

    summaries = []
    for method in config.methods:
        risks = [o.risk[method] for o in outcomes]
        mean, error = _mean_and_error(risks)
        summaries.append(
            MethodSummary(
                method=method,
                mean_mise=mean,
                std_error=error,
                risks=risks,
                chosen_h=[o.chosen_h[method] for o in outcomes],
            )
        )
    check = _quadrature_check(config, target, outcomes[0]) if config.quadrature_check else None
    elapsed = time.perf_counter() - started
    logger.info("✅ run_mise complete in %.1fs: %s", elapsed, {s.method: round(s.mean_mise, 6) for s in summaries})
    return MiseReport(
        config=config,
        target=target.name,
        h_min=grid.h_min,
        grid_size=len(grid),
        seeds=[o.seed for o in outcomes],
        methods=summaries,
        quadrature_check=check,
        wall_clock_seconds=elapsed if config.record_timing else None,
    )


def lambda_sweep(config: BenchConfig, workers: int | None = None) -> LambdaSweepReport:
    """Mean risk and mean SPCO bandwidth for every lambda of the grid, one pass per replication."""
    lambdas = config.lambdas
    logger.info("🚀 lambda_sweep started: %d lambdas x %d reps", len(lambdas), config.reps)
    started = time.perf_counter()
    target = resolve_target(config)
    grid = build_grid(config.n, target.d, get_kernel(config.kernel))
    outcomes = _replicate(config, target, config.n, workers, methods=(), lambdas=tuple(lambdas))

    h_min = grid.h_min
    rows = []
    for k, lam in enumerate(lambdas):
        chosen = np.array([o.sweep_h[k] for o in outcomes])
        mean_risk, error = _mean_and_error([o.sweep_risk[k] for o in outcomes])
        rows.append(
            LambdaSweepRow(
                lam=lam,
                mean_risk=mean_risk,
                std_error=error,
                mean_h=float(chosen.mean()),
                fraction_at_h_min=float(np.mean(np.isclose(chosen, h_min, rtol=1e-12, atol=0.0))),
                fraction_within_2h_min=float(np.mean(chosen <= 2.0 * h_min * (1.0 + 1e-12))),
            )
        )

    jump = next(
        (row.lam for row in sorted(rows, key=lambda r: r.lam) if row.mean_h > h_min * (1.0 + 1e-9)),
        None,
    )
    elapsed = time.perf_counter() - started
    logger.info("✅ lambda_sweep complete in %.1fs (dimension jump at lambda=%s)", elapsed, jump)
    return LambdaSweepReport(
        config=config,
        target=target.name,
        h_min=h_min,
        seeds=[o.seed for o in outcomes],
        rows=rows,
        dimension_jump_lambda=jump,
        wall_clock_seconds=elapsed if config.record_timing else None,
    )


def risk_curves(config: BenchConfig, single_seed: int | None = None) -> RiskCurvesReport:
    """All three criteria over H for one sample, with R_oracle shifted by -||f||^2."""
    seed = config.seed_for_single_draw if single_seed is None else single_seed
    logger.info("🚀 risk_curves started: n=%d seed=%d", config.n, seed)
    started = time.perf_counter()
    target = resolve_target(config)
    evaluation = evaluate_grid(target, config.n, seed, config.kernel)

    bandwidths = evaluation.grid.bandwidths
    spco = evaluation.components.criterion(config.lam)
    shifted = evaluation.risks - evaluation.target_sq_norm
    rows = [
        RiskCurveRow(h=float(h), r_oracle=float(r), r_spco=float(s), cv2=float(c), risk=float(full))
        for h, r, s, c, full in zip(bandwidths, shifted, spco, evaluation.cv2, evaluation.risks)
    ]
    argmin = {
        "Oracle": criterion_argmin(bandwidths, evaluation.risks),
        "SPCO": criterion_argmin(bandwidths, spco),
        "CV2": criterion_argmin(bandwidths, evaluation.cv2),
    }
    elapsed = time.perf_counter() - started
    logger.info("✅ risk_curves complete: %s", argmin)
    return RiskCurvesReport(
        config=config,
        target=target.name,
        seed=seed,
        h_min=evaluation.grid.h_min,
        rows=rows,
        argmin=argmin,
        wall_clock_seconds=elapsed if config.record_timing else None,
    )


def reconstruction(config: BenchConfig, single_seed: int | None = None) -> ReconstructionReport:
    """True density and the three selected estimates on a lat-long mesh."""
    seed = config.seed_for_single_draw if single_seed is None else single_seed
    logger.info("🚀 reconstruction started: n=%d seed=%d", config.n, seed)
    started = time.perf_counter()
    target = resolve_target(config)
    evaluation = evaluate_grid(target, config.n, seed, config.kernel)
    bandwidths = evaluation.grid.bandwidths
    chosen = {
        "Oracle": criterion_argmin(bandwidths, evaluation.risks),
        "SPCO": evaluation.components.select(config.lam),
        "CV2": criterion_argmin(bandwidths, evaluation.cv2),
    }

    mesh = lat_long_mesh(config.mesh_ntheta, config.mesh_nphi)
    columns = {"f": targets.density(target, mesh.points)}
    for method, h in chosen.items():
        columns[f"fhat_{method.lower()}"] = evaluate(evaluation.estimators[evaluation.grid.index_of(h)], mesh.points)
    rows = [
        ReconstructionRow(
            theta=float(theta), phi=float(phi), f=float(f), fhat_oracle=float(o), fhat_spco=float(s), fhat_cv2=float(c)
        )
        for theta, phi, f, o, s, c in zip(
            mesh.theta, mesh.phi, columns["f"], columns["fhat_oracle"], columns["fhat_spco"], columns["fhat_cv2"]
        )
    ]
    mass = {name: float(mesh.weights @ values) for name, values in columns.items()}
    elapsed = time.perf_counter() - started
    logger.info("✅ reconstruction complete: chosen=%s", chosen)
    return ReconstructionReport(
        config=config,
        target=target.name,
        seed=seed,
        chosen_h=chosen,
        mesh_shape=[config.mesh_ntheta, config.mesh_nphi],
        mesh_mass=mass,
        mesh=rows,
        wall_clock_seconds=elapsed if config.record_timing else None,
    )


def rate_sweep(config: BenchConfig, workers: int | None = None) -> RateReport:
    """Mean MISE of each selector at every sample size of config.n_grid."""
    logger.info("🚀 rate_sweep started: sizes=%s reps=%d", config.sizes, config.reps)
    started = time.perf_counter()
    target = resolve_target(config)
    rows = []
    for n in config.sizes:
        outcomes = _replicate(config, target, n, workers, methods=tuple(config.methods), lam=config.lam)
        for method in config.methods:
            mean, error = _mean_and_error([o.risk[method] for o in outcomes])
            rows.append(RateRow(n=n, method=method, mean_mise=mean, std_error=error))
        logger.info("📈 n=%d done", n)
    elapsed = time.perf_counter() - started
    logger.info("✅ rate_sweep complete in %.1fs", elapsed)
    return RateReport(
        config=config,
        target=target.name,
        rows=rows,
        wall_clock_seconds=elapsed if config.record_timing else None,
    )
