"""
Tests for estimating warpings and registering samples.
"""

from unittest.mock import patch

import numpy as np
import pytest
from loguru import logger

from eventwarp.config import PipelineConfig
from eventwarp.curves import Domain, build_curve, prepare_curve
from eventwarp.errors import (
    DomainMismatch,
    EmptyGroup,
    IdMismatch,
    ShapeMismatch,
    TooFewCurves,
    UnanchoredInput,
)
from eventwarp.pairwise import warp_pair
from eventwarp.registration import (
    WarpingEstimate,
    curve_on_grid,
    estimate_warpings,
    event_time_summary,
    group_means,
    mean_curve,
    recenter,
    register,
    register_sample,
    to_common_grid,
)

pytestmark = pytest.mark.unit


@pytest.fixture(autouse=True)
def quiet_errors():
    with patch.object(logger, "bind"):
        yield


def estimate(values, domain=None, grid_size=3):
    dom = domain or Domain(0.0, 1.0)
    times = np.linspace(dom.t_min, dom.t_max, len(values))
    return to_common_grid(WarpingEstimate("x", times, np.asarray(values), dom), grid_size)


class TestEstimateWarpings:
    def test_identical_pair_is_identity(self, unit_domain):
        curves = [prepare_curve(i, [0.2, 0.5, 0.6], unit_domain).unwrap() for i in (1, 2)]
        for curve, est in zip(curves, estimate_warpings(curves).unwrap(), strict=True):
            np.testing.assert_array_equal(est.h_inv_values, curve.times)
            assert est.curve_id == curve.id

    def test_average_over_partners(self, unit_domain):
        first = prepare_curve(1, [0.1, 0.2, 0.7], unit_domain).unwrap()
        second = prepare_curve(2, [0.4, 0.8], unit_domain).unwrap()
        twin = prepare_curve(3, [0.1, 0.2, 0.7], unit_domain).unwrap()
        estimates = estimate_warpings([first, second, twin]).unwrap()

        onto_second, _ = warp_pair(first, second).unwrap()
        expected = (onto_second.mapped_times + first.times) / 2
        np.testing.assert_allclose(estimates[0].h_inv_values, expected, atol=1e-15)

    def test_endpoints_pinned_and_monotone(self, small_sample):
        for est in estimate_warpings(small_sample).unwrap():
            assert est.h_inv_values[0] == 0.0
            assert est.h_inv_values[-1] == 1.0
            assert np.all(np.diff(est.h_inv_values) > 0)

    def test_too_few_curves(self, small_sample):
        assert isinstance(estimate_warpings(small_sample[:1]).unwrap_err(), TooFewCurves)

    def test_domain_mismatch(self):
        a = prepare_curve(1, [1.0], Domain(0.0, 10.0)).unwrap()
        b = prepare_curve(2, [1.0], Domain(0.0, 5.0)).unwrap()
        assert isinstance(estimate_warpings([a, b]).unwrap_err(), DomainMismatch)

    def test_unanchored(self, unit_domain):
        curves = [build_curve(i, [0.5], unit_domain).unwrap() for i in (1, 2)]
        assert isinstance(estimate_warpings(curves).unwrap_err(), UnanchoredInput)

    def test_duplicate_ids(self, unit_domain):
        curves = [prepare_curve(7, [0.5], unit_domain).unwrap() for _ in range(2)]
        assert isinstance(estimate_warpings(curves).unwrap_err(), IdMismatch)

    def test_process_pool_matches_serial(self, small_sample):
        serial = estimate_warpings(small_sample, threads=1).unwrap()
        pooled = estimate_warpings(small_sample, threads=2).unwrap()
        for a, b in zip(serial, pooled, strict=True):
            np.testing.assert_array_equal(a.h_inv_values, b.h_inv_values)


class TestCommonGrid:
    def test_pins_missing_endpoints(self):
        est = WarpingEstimate(1, np.array([5.0]), np.array([6.0]), Domain(0.0, 10.0))
        gridded = to_common_grid(est, 21)
        assert gridded.on_grid
        assert gridded.grid_values[5] == pytest.approx(3.0)
        assert gridded.grid_values[0] == 0.0
        assert gridded.grid_values[-1] == 10.0

    def test_identity_stays_identity(self, small_sample):
        gridded = to_common_grid(WarpingEstimate.identity(small_sample[0]), 11)
        np.testing.assert_allclose(gridded.grid_values, gridded.grid, atol=1e-15)

    def test_as_function_requires_grid(self, small_sample):
        with pytest.raises(ShapeMismatch):
            WarpingEstimate.identity(small_sample[0]).as_function()


class TestRegister:
    def test_identity_keeps_times(self, small_sample):
        curve = small_sample[1]
        registered = register(curve, WarpingEstimate.identity(curve)).unwrap()
        np.testing.assert_array_equal(registered.times, curve.times)
        np.testing.assert_array_equal(registered.values, curve.values)
        np.testing.assert_array_equal(registered.event_times, curve.event_times)

    def test_other_curve_rejected(self, small_sample):
        result = register(small_sample[0], WarpingEstimate.identity(small_sample[1]))
        assert isinstance(result.unwrap_err(), IdMismatch)

    def test_values_untouched(self, small_sample):
        estimates = estimate_warpings(small_sample).unwrap()
        for curve, est in zip(small_sample, estimates, strict=True):
            registered = register(curve, est).unwrap()
            np.testing.assert_array_equal(registered.event_values, curve.event_values)
            assert registered.n_events == curve.n_events


    def test_gaps_may_shrink_below_observed(self, unit_domain):
        curve = prepare_curve("c", [0.4, 0.6], unit_domain).unwrap()
        squeezed = WarpingEstimate("c", curve.times, np.array([0.0, 0.45, 0.47, 1.0]), unit_domain)
        registered = register(curve, squeezed).unwrap()
        assert registered.event_times.tolist() == [0.45, 0.47]
        assert np.diff(registered.event_times)[0] < np.diff(curve.event_times)[0] / 5


class TestMeans:
    def test_mean_is_average_of_interpolants(self, small_sample):
        mean = mean_curve(small_sample, grid_size=11).unwrap()
        expected = np.mean(
            [curve_on_grid(c, mean.grid) for c in small_sample], axis=0
        )
        np.testing.assert_allclose(mean.mean_values, expected, atol=1e-15)
        assert mean.size == 4

    def test_mean_of_copies_is_the_curve(self, unit_domain):
        curve = prepare_curve(1, [0.25, 0.5], unit_domain).unwrap()
        mean = mean_curve([curve, curve], grid_size=5).unwrap()
        assert mean.mean_values.tolist() == pytest.approx([0.0, 0.5, 1.0, 1.0, 1.0])

    def test_registration_moves_mean_towards_latent_curve(self, unit_domain):
        latent = np.array([0.2, 0.4, 0.6, 0.8])
        shifts = [0.1, -0.1, 0.05, -0.05]
        curves = [
            prepare_curve(i, latent + d, unit_domain).unwrap() for i, d in enumerate(shifts)
        ]
        run = register_sample(curves, PipelineConfig(grid_size=201)).unwrap()
        for registered, d in zip(run.registered, shifts, strict=True):
            np.testing.assert_allclose(registered.event_times, latent - d / 3, atol=1e-12)

        grid = unit_domain.grid(201)
        target = curve_on_grid(prepare_curve("mu", latent, unit_domain).unwrap(), grid)

        def distance(sample):
            mean = mean_curve(sample, grid_size=201).unwrap().mean_values
            return float(np.trapezoid((mean - target) ** 2, grid))

        assert distance(run.registered) < distance(curves) / 4

    def test_empty_group(self):
        assert isinstance(mean_curve([]).unwrap_err(), EmptyGroup)

    def test_group_means_sorted_by_label(self, small_sample):
        means = group_means(small_sample, ["b", "a", "b", "a"], grid_size=5).unwrap()
        assert [m.group for m in means] == ["a", "b"]
        assert [m.size for m in means] == [2, 2]

    def test_group_means_length_mismatch(self, small_sample):
        assert isinstance(group_means(small_sample, [0]).unwrap_err(), ShapeMismatch)

    def test_event_time_summary(self, small_sample):
        summary = event_time_summary(small_sample).unwrap()
        assert summary.n == 4
        assert summary.mean_first == pytest.approx(0.2625)
        assert summary.mean_last == pytest.approx(0.6875)
        assert isinstance(event_time_summary([]).unwrap_err(), EmptyGroup)


class TestRecenter:
    def test_average_becomes_identity(self):
        shifted = recenter([estimate([0.0, 0.3, 1.0]), estimate([0.0, 0.5, 1.0])]).unwrap()
        assert shifted[0].grid_values.tolist() == pytest.approx([0.0, 0.4, 1.0])
        assert shifted[1].grid_values.tolist() == pytest.approx([0.0, 0.6, 1.0])
        assert shifted[0].h_inv_values.tolist() == pytest.approx([0.0, 0.4, 1.0])

    def test_needs_grid(self, small_sample):
        raw = [WarpingEstimate.identity(c) for c in small_sample]
        assert isinstance(recenter(raw).unwrap_err(), ShapeMismatch)

    def test_empty(self):
        assert recenter([]).unwrap() == []


class TestRegisterSample:
    def test_counts_every_pair_once(self, small_sample):
        run = register_sample(small_sample).unwrap()
        assert run.pairs_aligned == 6
        assert len(run.registered) == 4
        assert run.grid.size == 101
        assert [r.curve_id for r in run.registered] == [c.id for c in small_sample]

    def test_config_is_honoured(self, small_sample):
        run = register_sample(small_sample, PipelineConfig(grid_size=21)).unwrap()
        assert all(e.grid.size == 21 for e in run.estimates)

    def test_invalid_config(self, small_sample):
        result = register_sample(small_sample, PipelineConfig(delta=0.0))
        assert result.is_err()
