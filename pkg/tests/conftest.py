import numpy as np
import pytest

from affinecert.affine import AffineMap


def boost(param):
    """Hyperbolic isometry of the standard (2,1) form, acting in the
    (v1, w1) plane of the (v1, v2, w1) coordinates."""
    c, s = np.cosh(param), np.sinh(param)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def rot(angle):
    """Rotation of the spacelike (v1, v2) plane, an isometry of (2,1)."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@pytest.fixture
def boost_matrix():
    return boost(np.log(2.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_invertible(rng, dim, tries=50):
    for _ in range(tries):
        m = rng.standard_normal((dim, dim))
        if abs(np.linalg.det(m)) > 1e-6:
            return m
    raise RuntimeError("could not sample an invertible matrix")


def random_affine(rng, dim):
    return AffineMap(random_invertible(rng, dim), rng.standard_normal(dim))
