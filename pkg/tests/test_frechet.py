import logging

import numpy as np
import pytest
from pydantic import ValidationError

from manistat.exceptions import InvalidInputError, PreconditionError
from manistat.frechet import FrechetConfig, FrechetInit, frechet_mean, karcher_mean
from manistat.geometry import ManifoldDescriptor, ManifoldSeries, get_manifold


def _sphere_cluster(rng, T=60, spread=0.3):
    m = get_manifold(ManifoldDescriptor.sphere(6))
    pole = np.eye(7)[6]
    v = spread * m.random_tangent(rng, np.broadcast_to(pole, (T, 7)))
    return ManifoldSeries(descriptor=m.descriptor, points=m.exp_map(pole, v))


class TestFrechetMean:
    def test_euclidean_mean_is_the_average(self, rng):
        points = rng.standard_normal((30, 4))
        series = ManifoldSeries(
            descriptor=ManifoldDescriptor.euclidean(4), points=points
        )
        mean, diagnostics = frechet_mean(series)
        np.testing.assert_allclose(mean.coords, points.mean(axis=0), atol=1e-12)
        assert diagnostics.converged
        assert diagnostics.iterations == 0

    def test_symmetric_sphere_sample(self, rng):
        m = get_manifold(ManifoldDescriptor.sphere(6))
        pole = np.eye(7)[6]
        v = 0.3 * m.random_tangent(rng, np.broadcast_to(pole, (10, 7)))
        points = m.exp_map(pole, np.concatenate([v, -v]))
        series = ManifoldSeries(descriptor=m.descriptor, points=points)
        mean, diagnostics = frechet_mean(series)
        assert diagnostics.converged
        assert m.distance(pole, mean) < 1e-8

    def test_spd_matrix_and_inverse_average_to_identity(self, rng):
        m = get_manifold(ManifoldDescriptor.spd(3))
        a = m.random_point(rng)
        series = ManifoldSeries(
            descriptor=m.descriptor, points=np.stack([a, np.linalg.inv(a)])
        )
        mean, diagnostics = frechet_mean(series)
        assert diagnostics.converged
        np.testing.assert_allclose(mean.coords, np.eye(3), atol=1e-8)

    def test_objective_never_increases(self, rng):
        series = _sphere_cluster(rng)
        cfg = FrechetConfig(init=FrechetInit.first_point)
        _, diagnostics = frechet_mean(series, cfg)
        steps = np.diff(diagnostics.objective)
        assert np.all(steps <= 1e-12)
        assert len(diagnostics.objective) == diagnostics.iterations + 1

    def test_non_convergence_is_reported(self, rng, caplog):
        series = _sphere_cluster(rng, spread=0.4)
        cfg = FrechetConfig(max_iter=1, tol=1e-15, init=FrechetInit.first_point)
        with caplog.at_level(logging.WARNING):
            _, diagnostics = frechet_mean(series, cfg)
        assert not diagnostics.converged
        assert diagnostics.iterations == 1
        assert "did not converge" in caplog.text


class TestPreconditions:
    def test_antipodal_pair_violates_hemisphere_condition(self):
        points = np.eye(7)[[6, 0, 1]]
        points[2] = -points[0]
        series = ManifoldSeries(
            descriptor=ManifoldDescriptor.sphere(6), points=points
        )
        with pytest.raises(PreconditionError) as excinfo:
            frechet_mean(series)
        assert "open hemisphere" in str(excinfo.value)

    def test_user_supplied_init_needs_a_point(self, rng):
        series = _sphere_cluster(rng)
        cfg = FrechetConfig(init=FrechetInit.user_supplied)
        with pytest.raises(InvalidInputError):
            karcher_mean(series.manifold, series.points, cfg)

    @pytest.mark.parametrize(
        "field", [{"step": 0.0}, {"step": 1.5}, {"tol": 0.0}, {"max_iter": 0}]
    )
    def test_config_bounds(self, field):
        with pytest.raises(ValidationError):
            FrechetConfig(**field)


def _orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


class TestEquivariance:
    def test_sphere_mean_follows_a_rotation(self, rng):
        series = _sphere_cluster(rng)
        rotation = _orthogonal(rng, 7)
        rotated = ManifoldSeries(
            descriptor=series.descriptor, points=series.points @ rotation.T
        )
        mean, _ = frechet_mean(series)
        mean_rotated, _ = frechet_mean(rotated)
        np.testing.assert_allclose(
            mean_rotated.coords, rotation @ mean.coords, atol=1e-7
        )

    def test_spd_mean_follows_a_congruence(self, rng):
        m = get_manifold(ManifoldDescriptor.spd(3))
        points = m.random_point(rng, (25,))
        a = rng.standard_normal((3, 3)) + 3.0 * np.eye(3)
        moved = a @ points @ a.T
        moved = 0.5 * (moved + np.swapaxes(moved, -1, -2))
        mean, _ = frechet_mean(ManifoldSeries(descriptor=m.descriptor, points=points))
        mean_moved, _ = frechet_mean(
            ManifoldSeries(descriptor=m.descriptor, points=moved)
        )
        np.testing.assert_allclose(
            mean_moved.coords, a @ mean.coords @ a.T, rtol=1e-7, atol=1e-7
        )

    def test_two_points_on_the_sphere_meet_halfway(self):
        pole, e1 = np.eye(7)[6], np.eye(7)[0]
        series = ManifoldSeries(
            descriptor=ManifoldDescriptor.sphere(6), points=np.stack([pole, e1])
        )
        mean, diagnostics = frechet_mean(series)
        assert diagnostics.converged
        np.testing.assert_allclose(
            mean.coords, (pole + e1) / np.sqrt(2.0), atol=1e-9
        )
