import json

import numpy as np
import pandas as pd
import pytest

from spherekde.bench.experiments import (
    evaluate_grid,
    lambda_sweep,
    rate_sweep,
    reconstruction,
    resolve_target,
    risk_curves,
    run_mise,
    run_replication,
)
from spherekde.bench.report_agent import write_report
from spherekde.errors import DomainError
from spherekde.kernel import get_kernel
from spherekde.schemas import DEFAULT_LAMBDA_GRID, BenchConfig
from spherekde.selectors import cv2_select, oracle_select, spco_select, variance_term
from spherekde.targets import f1vm, f2vm, sample


def _config(**overrides) -> BenchConfig:
    values = {"n": 100, "reps": 3, "base_seed": 11, "quadrature_check": False}
    values.update(overrides)
    return BenchConfig.model_validate(values)


def test_config_defaults_and_aliases():
    config = BenchConfig.model_validate({"lambda": 0.5, "workers": 3})
    assert config.lam == 0.5
    assert config.methods == ["Oracle", "SPCO", "CV2"]
    assert config.lambdas == DEFAULT_LAMBDA_GRID
    assert config.sizes == [100, 500, 2000]
    dumped = json.loads(config.model_dump_json(by_alias=True))
    assert "workers" not in dumped and dumped["lambda"] == 0.5


@pytest.mark.parametrize(
    "raw",
    [
        {"methods": []},
        {"methods": ["SPCO", "SPCO"]},
        {"methods": ["Cosine"]},
        {"n": 1},
        {"mode": "rate", "n_grid": [1, 100]},
        {"lambda_grid": []},
        {"target_id": None},
        {"reps": 0},
        {"unknown_field": 1},
    ],
)
def test_config_validation(raw):
    with pytest.raises(ValueError):
        BenchConfig.model_validate(raw)


def test_single_point_config_without_cv2():
    config = BenchConfig.model_validate({"n": 1, "methods": ["Oracle", "SPCO"]})
    assert config.n == 1


def test_resolve_target():
    assert resolve_target(_config()).name == "f1vm"
    assert resolve_target(_config(target_id="F2VM")).name == "f2vm"
    custom = resolve_target(_config(target=[{"kappa": 3.0, "mu": [0, 0, 1]}]))
    assert custom.name == "custom" and custom.components[0].kappa == 3.0
    with pytest.raises(DomainError):
        resolve_target(_config(target_id="watson"))


def test_replication_matches_selectors():
    K = get_kernel("vonmises")
    outcome = run_replication(f2vm(), 100, seed=21)
    data = sample(f2vm(), 100, 21).with_pairwise_cache()
    assert outcome.chosen_h["SPCO"] == spco_select(data, K).chosen_h
    assert outcome.chosen_h["CV2"] == cv2_select(data, K).chosen_h
    oracle = oracle_select(data, K, f2vm())
    assert outcome.chosen_h["Oracle"] == oracle.chosen_h
    for method, h in outcome.chosen_h.items():
        assert outcome.risk[method] == pytest.approx(oracle.value_at(h), rel=1e-12)


def test_oracle_dominates_each_replication():
    report = run_mise(_config(reps=4))
    oracle = report.summary("Oracle")
    for method in ("SPCO", "CV2"):
        other = report.summary(method)
        assert all(o <= r for o, r in zip(oracle.risks, other.risks))
        assert oracle.mean_mise <= other.mean_mise


def test_mise_report_layout():
    report = run_mise(_config(reps=3))
    assert report.kind == "mise" and report.target == "f1vm"
    assert report.seeds == [11, 12, 13]
    assert report.grid_size == 25 and report.h_min == pytest.approx(0.04)
    assert report.wall_clock_seconds is None
    frame = report.to_frame()
    assert list(frame.columns) == ["method", "rep", "seed", "chosen_h", "risk"]
    assert len(frame) == 9
    single = run_mise(_config(reps=1))
    assert single.summary("SPCO").std_error == 0.0


def test_quadrature_spot_check_agrees():
    report = run_mise(_config(reps=1, n=50, quadrature_check=True, quad_nt=512, quad_nphi=512))
    check = report.quadrature_check
    assert check is not None and check.method == "SPCO"
    assert check.abs_diff <= 1e-5 * check.exact_risk


def test_mise_is_independent_of_worker_count():
    config = _config(reps=4, quadrature_check=True)
    serial = run_mise(config, workers=1)
    parallel = run_mise(config, workers=2)
    assert serial.to_json() == parallel.to_json()


def test_timing_only_when_requested():
    report = run_mise(_config(reps=1, record_timing=True))
    assert report.wall_clock_seconds is not None
    assert "wall_clock_seconds" in report.to_json()


def test_huge_lambda_selects_largest_bandwidth():
    report = run_mise(_config(reps=2, methods=["SPCO"], lam=1e6))
    assert report.summary("SPCO").chosen_h == [1.0, 1.0]


def test_lambda_sweep_rows():
    report = lambda_sweep(_config(mode="lambda-sweep", reps=3, lambda_grid=[-1.0, 1.0, 1e6]))
    assert [row.lam for row in report.rows] == [-1.0, 1.0, 1e6]
    assert report.rows[-1].mean_h == 1.0
    assert report.rows[-1].fraction_at_h_min == 0.0
    for row in report.rows:
        assert 0.0 <= row.fraction_at_h_min <= row.fraction_within_2h_min <= 1.0
    assert report.dimension_jump_lambda is not None
    assert "lambda" in report.to_frame().columns


def test_lambda_sweep_agrees_with_mise():
    config = _config(mode="lambda-sweep", reps=3, lambda_grid=[1.0])
    sweep = lambda_sweep(config)
    mise = run_mise(config.model_copy(update={"methods": ["SPCO"]}))
    assert sweep.rows[0].mean_risk == pytest.approx(mise.summary("SPCO").mean_mise, rel=1e-12)


def test_risk_curves():
    config = _config(mode="risk-curves", single_seed=5)
    report = risk_curves(config)
    K = get_kernel("vonmises")
    data = sample(f1vm(), 100, 5).with_pairwise_cache()
    assert report.seed == 5 and len(report.rows) == 25
    assert report.argmin["SPCO"] == spco_select(data, K).chosen_h
    assert report.argmin["CV2"] == cv2_select(data, K).chosen_h
    assert report.argmin["Oracle"] == oracle_select(data, K, f1vm()).chosen_h
    assert report.rows[0].r_spco == pytest.approx(variance_term(K, report.h_min, 100), rel=1e-10)
    norm = report.rows[0].risk - report.rows[0].r_oracle
    assert all(row.risk - row.r_oracle == pytest.approx(norm, rel=1e-12) for row in report.rows)


def test_risk_curves_default_seed():
    assert risk_curves(_config(mode="risk-curves", base_seed=9)).seed == 9


def test_reconstruction_mass_and_mode():
    report = reconstruction(_config(mode="reconstruction", single_seed=3))
    assert report.mesh_shape == [181, 360]
    assert len(report.mesh) == 181 * 360
    for name, mass in report.mesh_mass.items():
        assert mass == pytest.approx(1.0, abs=1e-2), name
    frame = report.to_frame()
    peak = frame.loc[frame["fhat_spco"].idxmax()]
    direction = np.array(
        [np.sin(peak.theta) * np.cos(peak.phi), np.sin(peak.theta) * np.sin(peak.phi), np.cos(peak.theta)]
    )
    assert direction @ np.array([1.0, 0.0, 0.0]) > 0.7
    assert "mesh" not in json.loads(report.to_json())


def test_rate_sweep_rows():
    report = rate_sweep(_config(mode="rate", reps=2, n_grid=[20, 60], methods=["Oracle", "SPCO"]))
    assert [(row.n, row.method) for row in report.rows] == [(20, "Oracle"), (20, "SPCO"), (60, "Oracle"), (60, "SPCO")]
    assert all(row.mean_mise > 0 for row in report.rows)


def test_evaluate_grid_skips_unrequested_criteria():
    evaluation = evaluate_grid(f1vm(), 40, seed=1, spco=False, cv2=False)
    assert evaluation.components is None and evaluation.cv2 is None
    assert evaluation.risks.shape == (len(evaluation.grid),)
    assert np.all(evaluation.risks >= 0)


def test_write_report(tmp_path):
    report = run_mise(_config(reps=2))
    written = write_report(report, tmp_path / "out" / "mise.json")
    assert [p.name for p in written] == ["mise.json", "mise.csv"]
    parsed = json.loads(written[0].read_text())
    assert parsed["schema_version"] == "spherekde-report/1"
    assert parsed["config"]["base_seed"] == 11
    frame = pd.read_csv(written[1])
    assert list(frame.columns) == ["method", "rep", "seed", "chosen_h", "risk"]
    assert not list((tmp_path / "out").glob("*.tmp"))
