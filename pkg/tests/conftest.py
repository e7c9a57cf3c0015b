import os

import hypothesis
import numpy as np
import pytest

from spherekde.estimator import Sample
from spherekde.geometry import normalize_rows, product_quadrature_s2
from spherekde.kernel import von_mises_kernel

np.seterr(all="warn")

hypothesis.settings.register_profile("default", max_examples=25, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


def random_points(n: int, d: int = 3, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return normalize_rows(rng.standard_normal((n, d)))


def random_sample(n: int, d: int = 3, seed: int = 0, with_cache: bool = True) -> Sample:
    return Sample.from_points(random_points(n, d, seed), with_cache=with_cache)


def quadrature_for(h: float, power: int = 1):
    """Product rule resolving e^{power (x.y - 1)/h^2} to double precision."""
    z = power / h**2
    return product_quadrature_s2(max(64, int(z / 4) + 48), max(64, int(z / 2) + 64))


@pytest.fixture
def vmf():
    return von_mises_kernel()


@pytest.fixture(scope="session")
def quad64():
    return product_quadrature_s2(64, 64)
