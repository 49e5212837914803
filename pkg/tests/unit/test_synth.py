"""
Tests for the synthetic warping model.
"""

import math
from unittest.mock import patch

import numpy as np
import pytest
from loguru import logger

from eventwarp.curves import Domain
from eventwarp.errors import BadAmplitude, ConfigError
from eventwarp.synth import (
    SineFamily,
    SineWarp,
    WarpScenario,
    mu_inverse,
    sample_warping,
    simulate_sample,
    truth_on_grid,
)

pytestmark = pytest.mark.unit


@pytest.fixture(autouse=True)
def quiet_errors():
    with patch.object(logger, "bind"):
        yield


def flat(**kwargs):
    return WarpScenario(families=(SineFamily(amplitude=0.0),), **kwargs)


class TestSineWarp:
    def test_zero_amplitude_is_identity(self):
        warp = sample_warping(flat(), 0).unwrap()
        t = np.linspace(0.0, 1.0, 11)
        np.testing.assert_array_equal(warp(t), t)

    def test_monotone_with_fixed_endpoints(self):
        scenario = WarpScenario(families=(SineFamily(amplitude=0.1, components=3),))
        for i in range(20):
            warp = sample_warping(scenario, i).unwrap()
            assert np.all(np.diff(warp.values) > 0)
            assert warp(0.0) == 0.0
            assert warp(1.0) == 1.0

    def test_inverse_round_trip(self):
        warp = sample_warping(WarpScenario(), 3).unwrap()
        t = np.linspace(0.0, 1.0, 101)
        np.testing.assert_allclose(warp.inverse(warp(t)), t, atol=1e-12)

    def test_rescaled_domain(self):
        warp = SineWarp.build([0.1], Domain(10.0, 20.0))
        assert float(warp(15.0)) == pytest.approx(15.0 + 10.0 * 0.1)
        assert float(warp.inverse(warp(12.5))) == pytest.approx(12.5, abs=1e-10)

    def test_mean_is_identity(self):
        scenario = WarpScenario(n=2000)
        h = np.array([float(sample_warping(scenario, i).unwrap()(0.5)) for i in range(2000)])
        assert abs(h.mean() - 0.5) < 0.01


class TestScenario:
    def test_bad_amplitude(self):
        scenario = WarpScenario(families=(SineFamily(amplitude=0.2, components=3),))
        assert isinstance(scenario.validate().unwrap_err(), BadAmplitude)
        assert isinstance(simulate_sample(scenario).unwrap_err(), BadAmplitude)

    def test_fixed_family_bound_uses_one_component(self):
        assert SineFamily(amplitude=0.3, components=1, fixed=True).slope_bound < 1
        assert WarpScenario.two_regime().validate().is_ok()

    @pytest.mark.parametrize(
        "kwargs", [{"n": 0}, {"events_min": 0}, {"events_min": 6, "events_max": 5}]
    )
    def test_invalid_counts(self, kwargs):
        assert isinstance(WarpScenario(**kwargs).validate().unwrap_err(), ConfigError)

    def test_regimes_are_consecutive_blocks(self):
        scenario = WarpScenario.two_regime(n=10)
        assert [scenario.regime(i) for i in range(10)] == [0] * 5 + [1] * 5


class TestLatentTimes:
    def test_quantile_levels(self):
        sample = simulate_sample(flat(n=1, events_min=4, events_max=4)).unwrap()
        assert sample.curves[0].event_times.tolist() == pytest.approx([0.2, 0.4, 0.6, 0.8])

    def test_exponential_shape(self):
        levels = mu_inverse([0.0, 0.5, 1.0], "exponential")
        assert levels[0] == 0.0
        assert levels[2] == pytest.approx(1.0)
        assert levels[1] == pytest.approx(math.log1p(0.5 * math.expm1(3.0)) / 3.0)

    def test_iid_counts_within_bounds(self):
        sample = simulate_sample(flat(n=30, latent="iid", events_min=2, events_max=6)).unwrap()
        for latent in sample.latent_times:
            assert 2 <= latent.size <= 6
            assert np.all(np.diff(latent) >= 0)


class TestSimulateSample:
    def test_curves_are_anchored(self):
        sample = simulate_sample(WarpScenario(n=10)).unwrap()
        assert all(c.anchored for c in sample.curves)
        assert [c.id for c in sample.curves] == list(range(10))
        assert all(5 <= c.n_events <= 15 for c in sample.curves)

    def test_observed_times_are_warped_latent_times(self):
        sample = simulate_sample(WarpScenario(n=5)).unwrap()
        for curve, warp, latent in zip(
            sample.curves, sample.truth, sample.latent_times, strict=True
        ):
            np.testing.assert_allclose(curve.event_times, warp(latent), atol=1e-12)

    def test_reproducible(self):
        first = simulate_sample(WarpScenario(n=8, seed=5)).unwrap()
        second = simulate_sample(WarpScenario(n=8, seed=5)).unwrap()
        other = simulate_sample(WarpScenario(n=8, seed=6)).unwrap()
        for a, b in zip(first.curves, second.curves, strict=True):
            assert a == b
        assert any(a != b for a, b in zip(first.curves, other.curves, strict=True))

    def test_curve_does_not_depend_on_sample_size(self):
        small = simulate_sample(WarpScenario(n=4, seed=2)).unwrap()
        large = simulate_sample(WarpScenario(n=12, seed=2)).unwrap()
        assert small.curves[3] == large.curves[3]

    def test_two_regimes(self):
        sample = simulate_sample(WarpScenario.two_regime(n=6)).unwrap()
        assert sample.regimes == [0, 0, 0, 1, 1, 1]
        late = [float(w(0.5)) for w in sample.truth[:3]]
        assert late == pytest.approx([0.8] * 3)

    def test_truth_on_grid(self):
        sample = simulate_sample(WarpScenario(n=3)).unwrap()
        grid = np.linspace(0.0, 1.0, 21)
        table = truth_on_grid(sample.truth, grid)
        assert table.shape == (3, 21)
        np.testing.assert_allclose(table[:, [0, -1]], [[0.0, 1.0]] * 3)
