import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manifold_lens.geometry import uniform_ball
from manifold_lens.linalg import Subspace, operator_norm, sym_eig
from manifold_lens.measures import (DiscreteMeasure, MeasureError, covariance, covariance_about,
                                    point_covariance, reference_covariance, reference_eig_gap,
                                    reference_spectrum, restrict)

TRIANGLE = DiscreteMeasure.empirical([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


class TestDiscreteMeasure:
    def test_normalizes(self):
        mu = DiscreteMeasure([[0.0], [1.0]], [2.0, 6.0])
        np.testing.assert_allclose(mu.weights, [0.25, 0.75])
        assert abs(mu.weights.sum() - 1) <= 1e-12

    @pytest.mark.parametrize("atoms, weights", [
        ([[0.0]], [-1.0]),
        ([[0.0], [1.0]], [1.0]),
        ([[0.0]], [0.0]),
        ([[np.nan]], [1.0]),
        (np.zeros((0, 2)), []),
    ])
    def test_invalid(self, atoms, weights):
        with pytest.raises(MeasureError):
            DiscreteMeasure(atoms, weights)

    def test_helpers(self):
        mu = DiscreteMeasure.dirac([1.0, 2.0])
        assert mu.size == 1 and mu.ambient_dim == 2
        np.testing.assert_array_equal(mu.shifted([1, 1]).mean(), [2.0, 3.0])
        np.testing.assert_allclose(TRIANGLE.centered().mean(), [0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(TRIANGLE.mapped(lambda a: 2 * a).mean(), [2 / 3, 2 / 3])


class TestCovariance:
    def test_single_atom(self):
        np.testing.assert_array_equal(covariance(DiscreteMeasure.dirac([1.0, 2.0])), np.zeros((2, 2)))

    def test_two_point(self):
        np.testing.assert_allclose(covariance(DiscreteMeasure([[-1.0], [1.0]], [0.5, 0.5])), [[1.0]])

    def test_triangle(self):
        np.testing.assert_allclose(covariance(TRIANGLE), [[2 / 9, -1 / 9], [-1 / 9, 2 / 9]], atol=1e-15)

    def test_about_center(self):
        np.testing.assert_allclose(covariance_about(TRIANGLE, [0.0, 0.0]), np.eye(2) / 3, atol=1e-15)
        np.testing.assert_allclose(covariance_about(TRIANGLE, TRIANGLE.mean()), covariance(TRIANGLE), atol=1e-15)
        a, c = np.array([1.0, 2.0]), np.array([0.5, -1.0])
        np.testing.assert_allclose(covariance_about(DiscreteMeasure.dirac(a), c), np.outer(a - c, a - c))

    def test_point_covariance_matches_measure(self):
        x = np.random.default_rng(0).standard_normal((20, 3))
        np.testing.assert_allclose(point_covariance(x), covariance(DiscreteMeasure.empirical(x)), atol=1e-14)

    def test_psd(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            mu = DiscreteMeasure(rng.standard_normal((5, 3)), rng.random(5) + 0.01)
            assert sym_eig(covariance(mu)).eigvals[-1] >= -1e-12

    def test_fixed_center_identity(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            mu = DiscreteMeasure(rng.standard_normal((6, 2)), rng.random(6) + 0.01)
            c = rng.standard_normal(2)
            shift = mu.mean() - c
            np.testing.assert_allclose(covariance_about(mu, c), covariance(mu) + np.outer(shift, shift), atol=1e-12)

    def test_translation_and_scaling(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            mu = DiscreteMeasure(rng.standard_normal((4, 3)), rng.random(4) + 0.01)
            v, c = rng.standard_normal(3) * 5, rng.uniform(0.1, 10)
            np.testing.assert_allclose(covariance(mu.shifted(v)), covariance(mu), atol=1e-12)
            np.testing.assert_allclose(covariance(mu.mapped(lambda a: c * a)), c * c * covariance(mu),
                                       rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_disk_monte_carlo(self, d):
        D = d + 2
        basis = np.eye(D)[:, :d]
        rng = np.random.default_rng(100 + d)
        pts = uniform_ball(100_000, d, rng) @ basis.T
        err = operator_norm(point_covariance(pts) - reference_covariance(Subspace(basis)))
        assert err <= 0.01


class TestRestrict:
    def test_all_inside(self):
        out = restrict(TRIANGLE, [0.0, 0.0], 10.0)
        np.testing.assert_array_equal(out.atoms, TRIANGLE.atoms)
        np.testing.assert_array_equal(out.weights, TRIANGLE.weights)

    def test_empty(self):
        with pytest.raises(MeasureError, match="empty restriction"):
            restrict(TRIANGLE, [5.0, 5.0], 1.0)

    def test_example(self):
        mu = DiscreteMeasure.empirical([[0.0], [1.0], [3.0]])
        out = restrict(mu, [0.0], 2.0)
        np.testing.assert_array_equal(out.atoms.ravel(), [0.0, 1.0])
        np.testing.assert_allclose(out.weights, [0.5, 0.5])

    def test_strict_boundary(self):
        mu = DiscreteMeasure.empirical([[0.0], [1.0]])
        assert restrict(mu, [0.0], 1.0).size == 1


class TestReference:
    def test_covariance_examples(self):
        np.testing.assert_allclose(reference_covariance(Subspace(np.eye(3)[:, :2])), np.diag([1, 1, 0]) / 4)
        np.testing.assert_allclose(reference_covariance(Subspace(np.eye(2)[:, :1])), np.diag([1 / 3, 0]))
        np.testing.assert_allclose(reference_covariance(Subspace(np.eye(2))), np.eye(2) / 4)

    def test_spectrum(self):
        np.testing.assert_array_equal(reference_spectrum(2, 4), [0.25, 0.25, 0, 0])

    def test_gap_examples(self):
        assert reference_eig_gap(2, 2, 5) == 0.0
        assert reference_eig_gap(1, 2, 7) == pytest.approx(math.sqrt(10) / 12, rel=1e-14)
        assert reference_eig_gap(2, 4, 6) == pytest.approx(math.sqrt(40) / 24, rel=1e-14)
        with pytest.raises(MeasureError):
            reference_eig_gap(3, 2, 5)

    def test_gap_matches_direct(self):
        for D in range(1, 11):
            for d in range(1, D + 1):
                for dp in range(d, D + 1):
                    direct = np.linalg.norm(reference_spectrum(d, D) - reference_spectrum(dp, D))
                    assert reference_eig_gap(d, dp, D) == pytest.approx(direct, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=8), st.floats(-50, 50))
def test_covariance_1d_shift_invariant(xs, v):
    mu = DiscreteMeasure.empirical(np.array(xs)[:, None])
    assert covariance(mu.shifted([v]))[0, 0] == pytest.approx(covariance(mu)[0, 0], abs=1e-9)
