import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spherekde.errors import ConfigurationError, DomainError, InsufficientDataError
from spherekde.estimator import Sample, diff_sq_norm, evaluate, fit, loo_evaluate, sq_norm
from spherekde.geometry import UnitVector, product_quadrature_s2
from spherekde.kernel import c0, c2, cross_inner, get_kernel, make_kernel
from spherekde.schemas import SelectionReport
from spherekde.selectors import (
    build_grid,
    criterion_argmin,
    cv2_select,
    oracle_select,
    penalty,
    spco_components,
    spco_select,
    variance_term,
)
from spherekde.targets import exact_sq_norm, f1vm, sample

from conftest import quadrature_for, random_sample


@pytest.mark.parametrize("n, m_max", [(500, 56), (100, 25), (1, 2), (2000, 112)])
def test_build_grid_sizes(vmf, n, m_max):
    grid = build_grid(n, 3, vmf)
    assert grid.m_max == m_max
    assert grid.h_min == pytest.approx(1 / m_max)
    assert grid.bandwidths[0] == grid.h_min and grid.bandwidths[-1] == 1.0
    assert np.all(np.diff(grid.bandwidths) > 0)
    np.testing.assert_array_equal(grid.inverse_range, np.arange(1, m_max + 1))


def test_build_grid_small_sample():
    grid = build_grid(1, 3, get_kernel("vonmises"))
    np.testing.assert_allclose(grid.bandwidths, [0.5, 1.0])


def test_grid_respects_lower_bound(vmf):
    grid = build_grid(500, 3, vmf)
    lower = (vmf.sup_norm / (500 * 2 * np.pi)) ** 0.5
    assert grid.h_min >= lower
    assert 1 / (grid.m_max + 1) < lower


def test_empty_grid():
    heavy = make_kernel(lambda x: np.exp(-x), name="tall", sup_norm=100.0)
    with pytest.raises(ConfigurationError):
        build_grid(1, 3, heavy)


def test_grid_membership(vmf):
    grid = build_grid(100, 3, vmf)
    assert grid.index_of(1 / 3) == grid.m_max - 3
    assert grid.index_of(grid.h_min) == 0
    for h in (0.3, 1 / 26, 1.5):
        with pytest.raises(DomainError):
            grid.index_of(h)
    with pytest.raises(DomainError):
        penalty(0.3, grid)


def test_penalty_at_h_min(vmf):
    grid = build_grid(500, 3, vmf)
    h_min = grid.h_min
    assert penalty(h_min, grid, 1.0) == pytest.approx(variance_term(vmf, h_min, 500), rel=1e-12)


def test_penalty_linear_in_lambda(vmf):
    grid = build_grid(100, 3, vmf)
    for h in grid.bandwidths:
        shift = c0(vmf, h) ** 2 * c2(vmf, h) / 100
        for lam in (-1.0, 0.5, 3.0):
            assert penalty(h, grid, lam) - penalty(h, grid, 0.0) == pytest.approx(lam * shift, rel=1e-10, abs=1e-12)


def test_penalty_matches_direct_integral(vmf):
    grid = build_grid(500, 3, vmf)
    h, h_min, n = 1.0, grid.h_min, 500
    expected = (
        2 * c0(vmf, h) * c0(vmf, h_min) * cross_inner(vmf, h, h_min) / n
        - c0(vmf, h_min) ** 2 * c2(vmf, h_min) / n
    )
    assert penalty(h, grid, 1.0) == pytest.approx(expected, rel=1e-12)

    # both kernels centred at the pole: the integrand is zonal
    quad = product_quadrature_s2(int(2 / h_min**2 / 4) + 48, 4)

    def difference(x):
        t = x[:, 2]
        return (c0(vmf, h_min) * np.exp(-(1 - t) / h_min**2) - c0(vmf, h) * np.exp(-(1 - t) / h**2)) ** 2

    direct = c0(vmf, h) ** 2 * c2(vmf, h) / n - quad.integrate(difference) / n
    assert penalty(h, grid, 1.0) == pytest.approx(direct, rel=1e-8)


def test_criterion_argmin_tie_breaks_to_larger_h():
    assert criterion_argmin([0.1, 0.2, 0.5, 1.0], [3.0, 1.0, 1.0, 2.0]) == 0.5
    assert criterion_argmin([0.1, 0.2], [0.0, 1.0]) == 0.1
    with pytest.raises(DomainError):
        criterion_argmin([0.1, 0.2], [np.nan, 1.0])


@given(
    st.lists(st.integers(-50, 50), min_size=2, max_size=30),
    st.integers(-1000, 1000),
)
def test_argmin_invariant_under_shift(values, constant):
    bandwidths = 1.0 / np.arange(len(values), 0, -1)
    values = np.array(values, dtype=float)
    assert criterion_argmin(bandwidths, values + constant) == criterion_argmin(bandwidths, values)


def test_spco_at_h_min(vmf):
    sample_ = random_sample(100, seed=1)
    for lam in (1.0, -0.5, 2.0):
        report = spco_select(sample_, vmf, lam=lam)
        h_min = report.h_min
        assert report.table[0].h == h_min
        assert report.table[0].value == pytest.approx(lam * variance_term(vmf, h_min, 100), rel=1e-10)


def test_spco_criterion_matches_definition(vmf):
    sample_ = random_sample(60, seed=2)
    report = spco_select(sample_, vmf, lam=1.0)
    grid = build_grid(60, 3, vmf)
    overfit = fit(sample_, vmf, grid.h_min)
    for row in report.table[::5]:
        expected = diff_sq_norm(fit(sample_, vmf, row.h), overfit) + penalty(row.h, grid, 1.0)
        assert row.value == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_spco_report_is_consistent(vmf):
    report = spco_select(random_sample(200, seed=3), vmf)
    assert report.method == "SPCO" and report.lam == 1.0
    assert report.chosen_h in report.bandwidths
    assert report.value_at(report.chosen_h) == min(report.values)
    assert len(report.table) == 35
    assert set(report.diagnostics) == {"penalty", "diff_sq_norm"}


def test_spco_components_reuse_for_any_lambda(vmf):
    sample_ = random_sample(80, seed=4)
    components = spco_components(sample_, vmf)
    for lam in (-1.0, 0.1, 1.0, 5.0):
        report = spco_select(sample_, vmf, lam=lam)
        np.testing.assert_allclose(components.criterion(lam), report.values, rtol=1e-13)
        assert components.select(lam) == report.chosen_h


def test_spco_huge_lambda_picks_largest_bandwidth(vmf):
    report = spco_select(sample(f1vm(), 500, seed=5).with_pairwise_cache(), vmf, lam=1e6)
    assert report.chosen_h == 1.0


def test_cv2_two_points(vmf):
    sample_ = random_sample(2, seed=6)
    report = cv2_select(sample_, vmf)
    est = fit(sample_, vmf, 1.0)
    expected = sq_norm(est) - (
        loo_evaluate(est, 0, UnitVector(sample_.points[0])) + loo_evaluate(est, 1, UnitVector(sample_.points[1]))
    )
    assert report.value_at(1.0) == pytest.approx(expected, rel=1e-12)
    assert report.method == "CV2"


def test_cv2_needs_two_points(vmf):
    with pytest.raises(InsufficientDataError):
        cv2_select(random_sample(1), vmf)


def test_cv2_overfits_duplicated_data(vmf):
    points = sample(f1vm(), 50, seed=7).points
    doubled = Sample.from_points(np.vstack([points, points]), with_cache=True)
    report = cv2_select(doubled, vmf)
    assert report.chosen_h == report.h_min
    assert report.values[0] < report.values[-1]


def test_oracle_dominates_other_selectors(vmf):
    sample_ = sample(f1vm(), 300, seed=8).with_pairwise_cache()
    oracle = oracle_select(sample_, vmf, f1vm())
    for other in (spco_select(sample_, vmf), cv2_select(sample_, vmf)):
        assert oracle.value_at(oracle.chosen_h) <= oracle.value_at(other.chosen_h)
    shifted = np.array(oracle.diagnostics["shifted_risk"])
    np.testing.assert_allclose(np.array(oracle.values) - shifted, exact_sq_norm(f1vm()), rtol=1e-12)


def test_oracle_self_target(vmf):
    sample_ = random_sample(40, seed=9)
    h_star = 1 / 4
    report = oracle_select(sample_, vmf, fit(sample_, vmf, h_star))
    assert report.chosen_h == h_star
    assert report.value_at(h_star) == pytest.approx(0.0, abs=1e-12)


def test_oracle_requires_target(vmf):
    with pytest.raises(DomainError):
        oracle_select(random_sample(10), vmf, None)


def test_selection_report_json_alias(vmf):
    report = spco_select(random_sample(30, seed=10), vmf, lam=0.5, seed=11)
    text = report.to_json()
    assert '"lambda": 0.5' in text
    restored = SelectionReport.from_json(text)
    assert restored.lam == 0.5 and restored.chosen_h == report.chosen_h and restored.seed == 11


def test_estimate_at_chosen_bandwidth_is_a_density(vmf):
    sample_ = sample(f1vm(), 100, seed=12).with_pairwise_cache()
    report = spco_select(sample_, vmf)
    est = fit(sample_, vmf, report.chosen_h)
    assert quadrature_for(report.chosen_h).integrate(lambda x: evaluate(est, x)) == pytest.approx(1.0, abs=1e-6)
