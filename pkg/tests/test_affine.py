import numpy as np
import pytest

from affinecert.affine import (AffineMap, compose, conjugate, fixed_point,
                               homogeneous_embed, identity, invariant_axis,
                               maps_close)
from affinecert.errors import NoUnitEigenvalue, UnitEigenvalue
from affinecert.linalg import spectral_split

from conftest import boost, random_affine, rot


def translation(v):
    v = np.asarray(v, dtype=float)
    return AffineMap(np.eye(v.shape[0]), v)


class TestCompose:
    def test_translations_add(self):
        a = compose(translation([1.0, 2.0]), translation([3.0, -1.0]))
        assert np.allclose(a.translation, [4.0, 1.0])
        assert np.allclose(a.linear, np.eye(2))

    def test_inverse_cancels(self, rng):
        for _ in range(20):
            a = random_affine(rng, 3)
            assert maps_close(compose(a, a.inverse()), identity(3))
            assert maps_close(compose(a.inverse(), a), identity(3))

    def test_boost_squares(self, boost_matrix):
        g = AffineMap(boost_matrix, [0.0, 1.0, 0.0])
        g2 = compose(g, g)
        assert np.allclose(g2.linear, boost_matrix @ boost_matrix)
        assert np.allclose(g2.translation, [0.0, 2.0, 0.0])

    def test_associative(self, rng):
        for _ in range(20):
            a, b, c = (random_affine(rng, 3) for _ in range(3))
            lhs = compose(compose(a, b), c)
            rhs = compose(a, compose(b, c))
            assert maps_close(lhs, rhs)

    def test_power(self, boost_matrix):
        g = AffineMap(boost_matrix, [0.0, 1.0, 0.0])
        assert maps_close(g.power(3), compose(g, compose(g, g)))
        assert maps_close(g.power(-2), compose(g.inverse(), g.inverse()))
        assert maps_close(g.power(0), identity(3))


class TestHomogeneousEmbed:
    def test_identity(self):
        assert np.allclose(homogeneous_embed(identity(2)), np.eye(3))

    def test_translation_column(self):
        h = homogeneous_embed(translation([1.0, 2.0, 3.0]))
        assert np.allclose(h[:3, 3], [1.0, 2.0, 3.0])
        assert np.allclose(h[:3, :3], np.eye(3))

    def test_homomorphism(self, rng):
        for _ in range(30):
            a = random_affine(rng, 4)
            b = random_affine(rng, 4)
            lhs = homogeneous_embed(compose(a, b))
            rhs = homogeneous_embed(a) @ homogeneous_embed(b)
            assert np.linalg.norm(lhs - rhs) < 1e-10 * max(1.0, np.linalg.norm(rhs))


class TestFixedPoint:
    def test_diagonal(self):
        g = AffineMap(np.diag([2.0, 0.5]), [1.0, 0.0])
        assert np.allclose(fixed_point(g), [-1.0, 0.0])

    def test_minus_identity(self):
        v = np.array([1.0, -2.0, 0.5])
        g = AffineMap(-np.eye(3), v)
        assert np.allclose(fixed_point(g), v / 2)

    def test_rotation(self):
        g = AffineMap(np.array([[0.0, -1.0], [1.0, 0.0]]), [1.0, 0.0])
        p = fixed_point(g)
        assert np.linalg.norm(g(p) - p) < 1e-10

    def test_unit_eigenvalue_rejected(self, boost_matrix):
        with pytest.raises(UnitEigenvalue):
            fixed_point(AffineMap(boost_matrix, [0.0, 0.0, 0.0]))


class TestInvariantAxis:
    def test_pure_translation(self):
        axis = invariant_axis(translation([2.0, 0.0, 1.0]))
        assert np.allclose(axis.direction, [2.0, 0.0, 1.0])
        assert np.allclose(axis.base_point, 0.0)

    def test_boost_neutral_translation(self, boost_matrix):
        g = AffineMap(boost_matrix, [0.0, 1.0, 0.0])
        axis = invariant_axis(g, split=spectral_split(boost_matrix))
        assert np.allclose(axis.direction, [0.0, 1.0, 0.0], atol=1e-10)
        assert np.allclose(axis.base_point, 0.0, atol=1e-10)
        assert axis.e_plus[1].dim == 2
        assert axis.c_g[1].dim == 1

    def test_axis_is_invariant(self, rng, boost_matrix):
        for _ in range(20):
            g = AffineMap(boost_matrix, rng.standard_normal(3))
            axis = invariant_axis(g)
            image = g(axis.base_point)
            assert np.linalg.norm(image - (axis.base_point + axis.direction)) < 1e-8

    def test_direction_of_inverse_flips(self, rng, boost_matrix):
        for _ in range(10):
            g = AffineMap(boost_matrix, rng.standard_normal(3))
            assert np.allclose(invariant_axis(g.inverse()).direction,
                               -invariant_axis(g).direction, atol=1e-10)

    def test_conjugation_rule(self, rng):
        for _ in range(100):
            g = AffineMap(boost(rng.uniform(0.3, 1.5)), rng.standard_normal(3))
            t = AffineMap(rot(rng.uniform(0, 2 * np.pi)) @ boost(rng.uniform(0, 1)),
                          rng.standard_normal(3))
            h = conjugate(t, g)
            expected = t.linear @ invariant_axis(g).direction
            assert np.allclose(invariant_axis(h).direction, expected, atol=1e-8)

    def test_no_unit_eigenvalue_reports_fixed_point(self):
        g = AffineMap(np.diag([2.0, 3.0]), [1.0, 1.0])
        with pytest.raises(NoUnitEigenvalue) as exc:
            invariant_axis(g)
        p = exc.value.fixed_point
        assert np.linalg.norm(g(p) - p) < 1e-10

    def test_base_point_minimizes_norm(self, rng, boost_matrix):
        for _ in range(10):
            g = AffineMap(boost_matrix, rng.standard_normal(3))
            axis = invariant_axis(g)
            d = axis.direction / np.linalg.norm(axis.direction)
            # perturbing the base point along the family of invariant lines
            # can only move the line farther from the origin
            line_dist = np.linalg.norm(
                axis.base_point - np.dot(axis.base_point, d) * d)
            for _ in range(5):
                shift = rng.standard_normal(3)
                shift -= np.dot(shift, d) * d
                other = axis.base_point + 1e-3 * shift
                if np.linalg.norm(g(other) - (other + axis.direction)) > 1e-6:
                    continue  # not on an invariant line, skip
                other_dist = np.linalg.norm(other - np.dot(other, d) * d)
                assert line_dist <= other_dist + 1e-6
