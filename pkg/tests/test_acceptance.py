"""Monte Carlo rejection rates at desk scale. Run with `pytest --run-slow`."""

import numpy as np
import pytest

from manistat.cli import ExperimentConfig, run_experiment
from manistat.second_order import SecondOrderConfig, sigma2_estimator, v2_statistic
from tests.config import BOOTSTRAP_B, N_REPLICATES, SEED

pytestmark = pytest.mark.slow

# slack allowed when checking that a rate curve is monotone
MONOTONE_SLACK = 0.03


def _rates(tmp_path, **overrides):
    settings = dict(
        replicates=N_REPLICATES,
        bootstrap_B=BOOTSTRAP_B,
        seed=SEED,
        out=tmp_path / "run",
    )
    settings.update(overrides)
    cfg = ExperimentConfig(**settings)
    return [cell.reject_rate for cell in run_experiment(cfg).cells]


class TestSize:
    def test_camb_on_the_sphere(self, tmp_path):
        (rate,) = _rates(
            tmp_path, experiment="Table1", models="M1", T_values="100", methods="camb"
        )
        assert 0.03 <= rate <= 0.08

    def test_camb_on_spd_matrices(self, tmp_path):
        (rate,) = _rates(
            tmp_path, experiment="Table1", models="M2", T_values="100", methods="camb"
        )
        assert 0.02 <= rate <= 0.06

    def test_uncorrected_bootstrap_over_rejects_on_the_sphere(self, tmp_path):
        (rate,) = _rates(
            tmp_path, experiment="Table1", models="M1", T_values="500", methods="b1"
        )
        assert rate > 0.07

    def test_uncorrected_bootstrap_under_rejects_on_spd_matrices(self, tmp_path):
        (rate,) = _rates(
            tmp_path, experiment="Table1", models="M2", T_values="100", methods="b1"
        )
        assert rate < 0.03

    def test_ambient_baseline_over_rejects_on_the_sphere(self, tmp_path):
        (rate,) = _rates(
            tmp_path, experiment="Table1", models="M1", T_values="100", methods="b2"
        )
        assert rate > 0.5

    def test_second_order_on_the_sphere(self, tmp_path):
        short, long = _rates(
            tmp_path, experiment="Table2", models="M3_sphere", T_values="256,1024"
        )
        assert 0.05 <= short <= 0.13
        assert 0.03 <= long <= 0.10
        assert long <= short + MONOTONE_SLACK

    def test_second_order_in_euclidean_space(self, tmp_path):
        (rate,) = _rates(
            tmp_path, experiment="Table2", models="EuclideanAR", T_values="1024"
        )
        assert 0.04 <= rate <= 0.11


class TestPower:
    def test_first_order_detects_a_moving_mean(self, tmp_path):
        rates = _rates(
            tmp_path,
            experiment="PowerFirst",
            models="M1",
            T_values="500",
            taus="0,0.5,1",
            methods="camb",
            replicates=200,
        )
        assert rates[-1] >= 0.9
        assert all(np.diff(rates) >= -MONOTONE_SLACK)

    def test_second_order_detects_a_moving_coefficient(self, tmp_path):
        rates = _rates(
            tmp_path,
            experiment="PowerSecond",
            models="M3_sphere",
            T_values="1024",
            taus="0,0.75,1.5",
            replicates=200,
        )
        assert rates[-1] >= 0.9
        assert all(np.diff(rates) >= -MONOTONE_SLACK)


def test_sigma2_matches_white_noise_value(rng):
    cfg = SecondOrderConfig(block_n=16)
    estimates = [
        sigma2_estimator(v2_statistic(rng.standard_normal((4096, 1)), cfg))
        for _ in range(100)
    ]
    target = 1.0 / (2.0 * np.pi**2)
    assert abs(np.median(estimates) / target - 1.0) < 0.25


def test_rates_do_not_depend_on_worker_count(tmp_path):
    grid = dict(
        experiment="Table2",
        models="M3_spd",
        T_values="256",
        replicates=100,
        seed=SEED,
    )
    serial = run_experiment(
        ExperimentConfig(threads=1, out=tmp_path / "serial", **grid)
    )
    parallel = run_experiment(
        ExperimentConfig(threads=4, out=tmp_path / "parallel", **grid)
    )
    assert serial.numeric_content()["cells"] == parallel.numeric_content()["cells"]
