# spherekde/geometry.py
"""
Unit-sphere primitives: validated points, surface areas, rotations, and the
tensor-product quadrature over S^2 that serves as the numerical oracle for
every closed form in the package.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from spherekde.errors import DomainError

logger = logging.getLogger(__name__)

MIN_DIMENSION = 3
ZERO_NORM = 1e-300


def surface_area(d: int) -> float:
    """Area sigma_{d-1} = 2 pi^{d/2} / Gamma(d/2) of the unit sphere S^{d-1} in R^d."""
    if int(d) != d or d < 2:
        raise DomainError(f"surface_area needs an integer d >= 2, got {d}")
    return float(2.0 * np.exp(0.5 * d * np.log(np.pi) - special.gammaln(0.5 * d)))


def normalize_rows(raw) -> np.ndarray:
    """Scale every row of an (n, d) array to unit length."""
    points = np.atleast_2d(np.asarray(raw, dtype=float))
    if not np.all(np.isfinite(points)):
        raise DomainError("coordinates must be finite")
    norms = np.linalg.norm(points, axis=1)
    if np.any(norms <= ZERO_NORM):
        bad = int(np.flatnonzero(norms <= ZERO_NORM)[0])
        raise DomainError(f"row {bad} is a (near-)zero vector and has no direction")
    return points / norms[:, None]


@dataclass(frozen=True, eq=False)
class UnitVector:
    """A point of S^{d-1}, d >= 3. Construction normalizes silently."""

    coords: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.coords, dtype=float).reshape(-1)
        if raw.size < MIN_DIMENSION:
            raise DomainError(f"unit vectors live in R^d with d >= {MIN_DIMENSION}, got d={raw.size}")
        unit = normalize_rows(raw)[0]
        unit.flags.writeable = False
        object.__setattr__(self, "coords", unit)

    @property
    def d(self) -> int:
        return self.coords.size

    def dot(self, other: "UnitVector") -> float:
        return float(self.coords @ other.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


def normalize(raw) -> UnitVector:
    """Return raw / |raw| as a UnitVector."""
    return UnitVector(np.asarray(raw, dtype=float))


def north_pole(d: int = 3) -> UnitVector:
    e = np.zeros(d)
    e[-1] = 1.0
    return UnitVector(e)


def rotation_onto(mu) -> np.ndarray:
    """Proper rotation R (det +1) with R @ e_d = mu, e_d the north pole.

    Built from the Householder reflection exchanging e_d and mu, composed with
    a reflection of the first axis (which fixes e_d) to restore det = +1.
    """
    mu = np.asarray(mu.coords if isinstance(mu, UnitVector) else normalize(mu).coords)
    d = mu.size
    perp_sq = float(mu[:-1] @ mu[:-1])
    if perp_sq == 0.0 and mu[-1] > 0:
        return np.eye(d)
    # 1 - mu_d, computed without cancellation when mu is close to e_d
    gap = perp_sq / (1.0 + mu[-1]) if mu[-1] > 0 else 1.0 - mu[-1]
    v = -mu.copy()
    v[-1] = gap
    householder = np.eye(d) - np.outer(v, v) / gap
    householder[:, 0] *= -1.0
    return householder


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    """Nodes and positive weights on S^2 with sum(weights) = 4 pi."""

    nodes: np.ndarray
    weights: np.ndarray
    n_t: int
    n_phi: int

    @property
    def d(self) -> int:
        return self.nodes.shape[1]

    @property
    def size(self) -> int:
        return self.weights.size

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        """Sum of w_k f(node_k); f is evaluated once on the (m, 3) node array."""
        values = np.asarray(f(self.nodes), dtype=float)
        return float(self.weights @ values)

    def rotated(self, rotation: np.ndarray) -> "SphereQuadrature":
        """Same rule with every node mapped by `rotation` (polar axis -> rotation @ e_3)."""
        return SphereQuadrature(self.nodes @ rotation.T, self.weights, self.n_t, self.n_phi)


def product_quadrature_s2(n_t: int = 64, n_phi: int = 64) -> SphereQuadrature:
    """Gauss-Legendre in t = cos(colatitude) times an equispaced rule in azimuth.

    Exact for polynomials in t of degree <= 2 n_t - 1 times trigonometric
    polynomials in the azimuth of degree < n_phi.
    """
    if n_t < 2 or n_phi < 2:
        raise DomainError(f"quadrature resolution must be >= 2 in both directions, got {n_t}x{n_phi}")
    t, w_t = np.polynomial.legendre.leggauss(int(n_t))
    phi = 2.0 * np.pi * np.arange(int(n_phi)) / n_phi
    radius = np.sqrt(np.clip(1.0 - t * t, 0.0, None))

    nodes = np.stack(
        [
            np.outer(radius, np.cos(phi)),
            np.outer(radius, np.sin(phi)),
            np.outer(t, np.ones(int(n_phi))),
        ],
        axis=-1,
    ).reshape(-1, 3)
    weights = np.outer(w_t, np.full(int(n_phi), 2.0 * np.pi / n_phi)).reshape(-1)
    weights *= 4.0 * np.pi / weights.sum()
    logger.debug("Built %dx%d product quadrature (%d nodes)", n_t, n_phi, weights.size)
    return SphereQuadrature(nodes, weights, int(n_t), int(n_phi))


def spherical_to_cartesian(theta, phi) -> np.ndarray:
    """Colatitude theta and azimuth phi (radians) to points on S^2."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1
    )


@dataclass(frozen=True, eq=False)
class EvaluationMesh:
    """Flattened lat-long mesh with trapezoid area weights."""

    theta: np.ndarray
    phi: np.ndarray
    points: np.ndarray
    weights: np.ndarray


def lat_long_mesh(n_theta: int = 181, n_phi: int = 360) -> EvaluationMesh:
    if n_theta < 2 or n_phi < 1:
        raise DomainError(f"mesh needs n_theta >= 2 and n_phi >= 1, got {n_theta}x{n_phi}")
    theta_axis = np.linspace(0.0, np.pi, int(n_theta))
    phi_axis = 2.0 * np.pi * np.arange(int(n_phi)) / n_phi

    step = theta_axis[1] - theta_axis[0]
    w_theta = np.full(theta_axis.size, step)
    w_theta[[0, -1]] *= 0.5
    w_theta *= np.sin(theta_axis)

    theta, phi = np.meshgrid(theta_axis, phi_axis, indexing="ij")
    weights = np.outer(w_theta, np.full(phi_axis.size, 2.0 * np.pi / n_phi))
    return EvaluationMesh(
        theta=theta.reshape(-1),
        phi=phi.reshape(-1),
        points=spherical_to_cartesian(theta, phi).reshape(-1, 3),
        weights=weights.reshape(-1),
    )
