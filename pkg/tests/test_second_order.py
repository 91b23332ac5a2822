import logging

import numpy as np
import pytest

from manistat.exceptions import (
    BlockIndexError,
    DegenerateDataError,
    InvalidInputError,
    PreconditionError,
)
from manistat.frechet import frechet_mean
from manistat.geometry import ManifoldDescriptor, ManifoldPoint, ManifoldSeries
from manistat.second_order import (
    DetrendMode,
    SecondOrderConfig,
    WScale,
    block_dft,
    block_layout,
    default_block_n,
    detrend,
    local_periodogram,
    second_order_test,
    sigma2_estimator,
    tangent_coordinates,
    v2_statistic,
)
from manistat.simulate import SimSpec, simulate


def _euclidean_series(points):
    return ManifoldSeries(
        descriptor=ManifoldDescriptor.euclidean(points.shape[1]), points=points
    )


class TestBlockLayout:
    @pytest.mark.parametrize("T, n", [(1024, 128), (100, 12), (37, 4), (10, 2)])
    def test_default_block_size(self, T, n):
        assert default_block_n(T) == n

    def test_tiling_drops_the_tail(self):
        layout = block_layout(100, 8)
        assert layout.m == 12
        assert layout.dropped == 4
        assert layout.T_eff == 96
        assert layout.tiling
        assert layout.starts[:3] == [1, 9, 17]

    def test_overlapping_blocks_are_flagged(self, caplog):
        with caplog.at_level(logging.WARNING):
            layout = block_layout(37, 8, [1, 8, 15, 22, 30])
        assert not layout.tiling
        assert layout.m == 5
        assert layout.T_eff == 40
        assert "non-tiling" in caplog.text

    def test_block_outside_the_series(self):
        with pytest.raises(BlockIndexError) as excinfo:
            block_layout(37, 8, [1, 31])
        assert excinfo.value.index == 2

    def test_block_size_must_be_even(self):
        with pytest.raises(InvalidInputError):
            block_layout(100, 7)
        with pytest.raises(InvalidInputError):
            SecondOrderConfig(block_n=7)


class TestPeriodogram:
    def test_block_dft_matches_direct_sum(self, rng):
        coords = rng.standard_normal((64, 3))
        layout = block_layout(64, 16)
        J = block_dft(coords, layout)
        assert J.shape == (4, 9, 3)
        h = np.arange(16)
        for j, start in enumerate(layout.starts):
            window = coords[start - 1 : start + 15]
            for k in range(9):
                phase = np.exp(-1j * h * 2 * np.pi * k / 16)
                expected = phase @ window / np.sqrt(2 * np.pi * 16)
                np.testing.assert_allclose(J[j, k], expected, atol=1e-12)

    def test_local_periodogram_matches_block(self, rng):
        series = _euclidean_series(rng.standard_normal((128, 2)))
        mean = ManifoldPoint(descriptor=series.descriptor, coords=np.zeros(2))
        basis = series.manifold.standard_basis(mean.coords)
        coords = tangent_coordinates(series, mean, basis)
        summary = v2_statistic(coords, SecondOrderConfig(block_n=16))
        t = summary.layout.centers()[1]
        local = local_periodogram(series, mean, basis, summary.omegas[3], t, 16)
        np.testing.assert_allclose(local.J, summary.J[1, 3], atol=1e-12)
        np.testing.assert_allclose(summary.periodogram(2, 3).J, local.J)
        I = local.I
        np.testing.assert_allclose(I, I.conj().T)
        assert np.linalg.matrix_rank(I) == 1

    def test_window_at_index_zero_is_shifted(self, rng, caplog):
        series = _euclidean_series(rng.standard_normal((64, 2)))
        mean = ManifoldPoint(descriptor=series.descriptor, coords=np.zeros(2))
        basis = series.manifold.standard_basis(mean.coords)
        with caplog.at_level(logging.WARNING):
            shifted = local_periodogram(series, mean, basis, 0.0, 3 / 64, 8)
        assert "shifted" in caplog.text
        np.testing.assert_allclose(
            shifted.J, series.points[:8].sum(axis=0) / np.sqrt(2 * np.pi * 8)
        )

    @pytest.mark.parametrize("t", [1 / 64, 1.0])
    def test_window_outside_the_series(self, rng, t):
        series = _euclidean_series(rng.standard_normal((64, 2)))
        mean = ManifoldPoint(descriptor=series.descriptor, coords=np.zeros(2))
        basis = series.manifold.standard_basis(mean.coords)
        with pytest.raises(BlockIndexError):
            local_periodogram(series, mean, basis, 0.0, t, 8)


class TestStatistic:
    def test_terms_and_scalings(self, rng):
        coords = rng.standard_normal((256, 2))
        corrected = v2_statistic(coords, SecondOrderConfig(block_n=16))
        literal = v2_statistic(
            coords, SecondOrderConfig(block_n=16, w_scale=WScale.literal)
        )
        assert corrected.V2_hat == pytest.approx(
            corrected.cross_term + corrected.W_hat - corrected.mean_term
        )
        m = corrected.layout.m
        assert corrected.W_hat == pytest.approx(4 * np.pi / m * literal.W_hat)
        assert corrected.cross_term == literal.cross_term

    def test_sigma2_for_white_noise(self, rng):
        estimates = [
            sigma2_estimator(
                v2_statistic(rng.standard_normal((4096, 1)), SecondOrderConfig(block_n=16))
            )
            for _ in range(10)
        ]
        target = 1.0 / (2.0 * np.pi**2)
        assert abs(np.median(estimates) / target - 1.0) < 0.25

    def test_zero_energy_is_degenerate(self):
        summary = v2_statistic(np.zeros((64, 2)), SecondOrderConfig(block_n=8))
        with pytest.raises(DegenerateDataError):
            sigma2_estimator(summary)

    def test_white_noise_is_not_flagged(self, rng):
        series = _euclidean_series(rng.standard_normal((2048, 3)))
        report = second_order_test(series, SecondOrderConfig(block_n=64))
        assert abs(report.z) < 4
        assert 0.0 <= report.p_value <= 1.0
        assert report.m == 32
        assert report.tiling

    def test_variance_change_is_rejected(self, rng):
        points = rng.standard_normal((1024, 1))
        points[512:] *= 3.0
        report = second_order_test(
            _euclidean_series(points), SecondOrderConfig(block_n=64)
        )
        assert report.reject
        assert report.z > 3


class TestDetrend:
    def _geodesic_series(self, T=64):
        descriptor = ManifoldDescriptor.sphere(6)
        m = descriptor.manifold
        pole, target = np.eye(7)[6], np.eye(7)[0]
        points = m.geodesic(pole, target, 0.5 * np.arange(1, T + 1) / T)
        return ManifoldSeries(descriptor=descriptor, points=points)

    def test_noise_free_trend_leaves_no_residual(self):
        result = detrend(self._geodesic_series(), bandwidth=10)
        np.testing.assert_allclose(result.coords, 0.0, atol=1e-6)
        np.testing.assert_allclose(result.basis.gram(), np.eye(6), atol=1e-10)

    def test_default_bandwidth(self):
        assert detrend(self._geodesic_series()).bandwidth == 12

    def test_bandwidth_below_two(self):
        with pytest.raises(PreconditionError):
            detrend(self._geodesic_series(), bandwidth=1)

    def test_supplied_basis_is_moved_to_the_first_mean(self):
        series = simulate(SimSpec(model="M3_sphere", T=64, seed=3))
        m = series.manifold
        default = detrend(series, bandwidth=10)
        custom = detrend(series, bandwidth=10, basis=m.standard_basis(np.eye(7)[6]))
        np.testing.assert_allclose(custom.basis.base, default.curve[0])
        np.testing.assert_allclose(
            np.linalg.norm(custom.coords, axis=1),
            np.linalg.norm(default.coords, axis=1),
            atol=1e-9,
        )

    def test_detrended_test_report(self):
        series = simulate(SimSpec(model="M3_sphere", T=256, seed=4))
        report = second_order_test(
            series, SecondOrderConfig(detrend=DetrendMode.block_frechet)
        )
        assert report.detrend is DetrendMode.block_frechet
        assert report.bandwidth == 51
        assert report.frechet is None
        assert report.block_n == 32


def _orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


class TestPeriodogramIdentities:
    def test_parseval_over_one_block(self, rng):
        series = _euclidean_series(rng.standard_normal((64, 3)))
        mean = ManifoldPoint(descriptor=series.descriptor, coords=np.zeros(3))
        basis = series.manifold.standard_basis(mean.coords)
        layout = block_layout(64, 16)
        start = layout.starts[1]
        t = layout.centers()[1]
        weights = np.full(9, 2.0)
        weights[[0, -1]] = 1.0
        energy = sum(
            w * np.trace(local_periodogram(series, mean, basis, omega, t, 16).I).real
            for w, omega in zip(weights, 2 * np.pi * np.arange(9) / 16)
        )
        window = series.points[start - 1 : start + 15]
        assert energy == pytest.approx(np.sum(window**2) / (2 * np.pi), rel=1e-10)


class TestStatisticInvariance:
    def test_rotating_the_basis_changes_nothing(self, rng):
        coords = rng.standard_normal((256, 3))
        rotated = coords @ _orthogonal(rng, 3).T
        cfg = SecondOrderConfig(block_n=16)
        plain, turned = v2_statistic(coords, cfg), v2_statistic(rotated, cfg)
        assert turned.V2_hat == pytest.approx(plain.V2_hat, rel=1e-10, abs=1e-12)
        assert turned.W_hat == pytest.approx(plain.W_hat, rel=1e-10)
        assert sigma2_estimator(turned) == pytest.approx(
            sigma2_estimator(plain), rel=1e-10
        )

    def test_sigma2_is_homogeneous_of_degree_eight(self, rng):
        coords = rng.standard_normal((256, 2))
        cfg = SecondOrderConfig(block_n=16)
        base = sigma2_estimator(v2_statistic(coords, cfg))
        scaled = sigma2_estimator(v2_statistic(2.0 * coords, cfg))
        assert scaled == pytest.approx(2.0**8 * base, rel=1e-10)

    def test_w_is_unchanged_by_time_reversal(self, rng):
        coords = rng.standard_normal((256, 2))
        cfg = SecondOrderConfig(block_n=16)
        forward = v2_statistic(coords, cfg)
        backward = v2_statistic(coords[::-1], cfg)
        assert backward.W_hat == pytest.approx(forward.W_hat, rel=1e-10)

    def test_reject_is_a_plain_bool(self, rng):
        series = _euclidean_series(rng.standard_normal((256, 2)))
        report = second_order_test(series, SecondOrderConfig(block_n=16))
        assert type(report.reject) is bool
        assert type(report.model_dump()["reject"]) is bool


class TestDetrendEnds:
    def test_first_residual_is_not_forced_to_zero(self):
        series = simulate(SimSpec(model="M3_sphere", T=128, seed=8))
        result = detrend(series, bandwidth=20)
        assert np.linalg.norm(result.coords[0]) > 1e-3
        assert series.manifold.distance(result.base.coords, series.points[0]) > 1e-3

    def test_constant_mean_matches_the_plain_coordinates(self):
        series = simulate(SimSpec(model="M3_sphere", T=512, seed=12))
        mean, _ = frechet_mean(series)
        basis = series.manifold.standard_basis(mean.coords)
        plain = tangent_coordinates(series, mean, basis)
        result = detrend(series, basis=basis)
        assert result.bandwidth == 102
        rms = np.sqrt(np.mean((result.coords - plain) ** 2))
        assert rms <= 0.1

    def test_linear_trend_leaves_centred_residuals(self, rng):
        T = 512
        trend = np.arange(1, T + 1)[:, None] / T
        points = trend + 0.5 * rng.standard_normal((T, 2))
        result = detrend(_euclidean_series(points))
        np.testing.assert_array_less(
            np.abs(result.coords.mean(axis=0)), 2.0 / np.sqrt(T)
        )
