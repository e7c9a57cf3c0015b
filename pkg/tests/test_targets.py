import numpy as np
import pytest

from spherekde.errors import DomainError
from spherekde.estimator import Sample, evaluate, fit, sq_norm
from spherekde.geometry import UnitVector
from spherekde.schemas import TargetComponentSpec
from spherekde.targets import (
    TargetDensity,
    VmfComponent,
    density,
    exact_inner,
    exact_sq_norm,
    f1vm,
    f2vm,
    get_target,
    l2_risk,
    mean_resultant_length,
    sample,
    spot_check_risk,
    target_from_components,
    vmf_peak,
)

from conftest import quadrature_for, random_sample


def _single(kappa, mu=(0.0, 0.0, 1.0)):
    return TargetDensity((VmfComponent(kappa, UnitVector(mu), 1.0),))


def test_builtin_targets():
    one, two = f1vm(), f2vm()
    assert one.components[0].kappa == 2.0
    np.testing.assert_array_equal(one.components[0].mu.coords, [1.0, 0.0, 0.0])
    assert [c.weight for c in two.components] == [0.8, 0.2]
    assert two.components[1].kappa == 0.7
    np.testing.assert_array_equal(two.components[1].mu.coords, [-1.0, 0.0, 0.0])
    assert get_target("F1VM").name == "f1vm"
    with pytest.raises(DomainError):
        get_target("watson")


def test_density_at_mode():
    mode = UnitVector([1.0, 0.0, 0.0])
    expected = 2 / (2 * np.pi * (np.exp(2) - np.exp(-2))) * np.exp(2)
    assert density(f1vm(), mode) == pytest.approx(expected, rel=1e-12)
    assert density(f1vm(), mode) == pytest.approx(0.32425, abs=1e-5)
    assert f1vm().components[0].normalizer == pytest.approx(2 / (2 * np.pi * (np.exp(2) - np.exp(-2))), rel=1e-12)


def test_near_uniform_density():
    target = _single(1e-6)
    for x in ([1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.3, 0.4, 0.5]):
        assert density(target, UnitVector(x)) == pytest.approx(1 / (4 * np.pi), abs=1e-6)
    assert vmf_peak(1e-12) == pytest.approx(1 / (4 * np.pi), rel=1e-10)


def test_density_dimension_mismatch():
    with pytest.raises(DomainError):
        density(f1vm(), np.ones((2, 4)))


def test_component_validation():
    with pytest.raises(DomainError):
        VmfComponent(0.0, UnitVector([1.0, 0.0, 0.0]))
    with pytest.raises(DomainError):
        VmfComponent(1.0, UnitVector([1.0, 0.0, 0.0]), weight=1.5)
    with pytest.raises(DomainError):
        VmfComponent(1.0, UnitVector([1.0, 0.0, 0.0, 0.0]))
    with pytest.raises(DomainError):
        TargetDensity((VmfComponent(1.0, UnitVector([1.0, 0.0, 0.0]), 0.5),))


def test_target_from_components():
    target = target_from_components(
        [
            {"kappa": 2.0, "mu": [1, 0, 0], "weight": 0.8},
            TargetComponentSpec(kappa=0.7, mu=[-2, 0, 0], weight=0.2),
        ]
    )
    assert exact_sq_norm(target) == pytest.approx(exact_sq_norm(f2vm()), rel=1e-14)
    with pytest.raises(DomainError):
        target_from_components([{"kappa": 1.0, "mu": [0, 0, 1], "weight": 0.7}])
    with pytest.raises(DomainError):
        target_from_components([])


def test_sampler_mean_resultant_length():
    points = sample(_single(2.0, (1.0, 0.0, 0.0)), 100_000, seed=1).points
    assert np.linalg.norm(points.mean(axis=0)) == pytest.approx(1 / np.tanh(2) - 0.5, abs=0.01)
    assert mean_resultant_length(2.0) == pytest.approx(0.537315, abs=1e-6)


def test_sampler_near_uniform():
    points = sample(_single(1e-6), 100_000, seed=2).points
    assert np.linalg.norm(points.mean(axis=0)) < 0.02


@pytest.mark.parametrize("kappa", [0.7, 2.0, 10.0])
def test_sampler_polar_moment(kappa):
    mu = np.array([0.0, 0.6, 0.8])
    points = sample(_single(kappa, mu), 100_000, seed=int(kappa * 10)).points
    w = points @ mu
    error = w.std(ddof=1) / np.sqrt(w.size)
    assert abs(w.mean() - mean_resultant_length(kappa)) < 4 * error


def test_sampler_is_deterministic_and_on_sphere():
    first = sample(f2vm(), 500, seed=7)
    second = sample(f2vm(), 500, seed=7)
    assert isinstance(first, Sample)
    assert first.points.tobytes() == second.points.tobytes()
    np.testing.assert_allclose(np.linalg.norm(first.points, axis=1), 1.0, atol=1e-14)
    with pytest.raises(DomainError):
        sample(f1vm(), 0, seed=1)


def test_mixture_sampler_proportions():
    points = sample(f2vm(), 20_000, seed=3).points
    # the second component points away from +x; its mass shows up in the mean
    expected = 0.8 * mean_resultant_length(2.0) - 0.2 * mean_resultant_length(0.7)
    assert points[:, 0].mean() == pytest.approx(expected, abs=0.02)


def test_exact_sq_norm_f1vm(quad64):
    C = 2 / (2 * np.pi * (np.exp(2) - np.exp(-2)))
    assert exact_sq_norm(f1vm()) == pytest.approx(C**2 * 4 * np.pi * np.sinh(4) / 4, rel=1e-12)
    assert exact_sq_norm(f1vm()) == pytest.approx(quad64.integrate(lambda x: density(f1vm(), x) ** 2), rel=1e-8)


def test_exact_sq_norm_f2vm_and_uniform(quad64):
    assert exact_sq_norm(f2vm()) == pytest.approx(quad64.integrate(lambda x: density(f2vm(), x) ** 2), rel=1e-8)
    assert exact_sq_norm(_single(1e-9)) == pytest.approx(1 / (4 * np.pi), abs=1e-8)


def test_exact_inner_single_point(vmf, quad64):
    est = fit(Sample.from_points([[1.0, 0.0, 0.0]]), vmf, 1.0)
    quad = quad64.integrate(lambda x: density(f1vm(), x) * evaluate(est, x))
    assert exact_inner(est, f1vm()) == pytest.approx(quad, rel=1e-8)


def test_exact_inner_uniform_target(vmf):
    est = fit(random_sample(30, seed=4), vmf, 0.2)
    assert exact_inner(est, _single(1e-9)) == pytest.approx(1 / (4 * np.pi), abs=1e-6)


@pytest.mark.parametrize("h", [1.0, 0.5, 0.2, 0.1, 1 / 25])
def test_exact_inner_matches_quadrature(vmf, h):
    est = fit(random_sample(50, seed=5), vmf, h)
    quad = quadrature_for(h).integrate(lambda x: density(f2vm(), x) * evaluate(est, x))
    assert exact_inner(est, f2vm()) == pytest.approx(quad, rel=1e-8)


@pytest.mark.parametrize("h", [1.0, 1 / 3, 0.1])
def test_l2_risk(vmf, h):
    est = fit(sample(f1vm(), 200, seed=6), vmf, h)
    risk = l2_risk(est, f1vm())
    assert risk >= 0.0
    unclipped = sq_norm(est) - 2 * exact_inner(est, f1vm()) + exact_sq_norm(f1vm())
    assert unclipped >= -1e-10
    assert spot_check_risk(est, f1vm(), quadrature_for(h, power=2)) == pytest.approx(risk, rel=1e-7)
