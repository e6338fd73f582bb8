"""
Unit tests for observables, the spreading exponent and the well-curve fit.
"""

import math

import numpy as np
import pytest

from pachner_walk.core import observables
from pachner_walk.core.exceptions import ValidationError
from pachner_walk.core.models import ObservableRecord


def _records(pairs):
    return [ObservableRecord(step=t, norm=1.0, var_total=v) for t, v in pairs]


def test_initial_position_stats(make_state):
    """The origin state sits on the three edge midpoints."""
    stats = observables.position_stats(make_state(), max_moments=4)
    assert stats["mean_x"] == pytest.approx(0.0, abs=1e-12)
    assert stats["mean_y"] == pytest.approx(0.0, abs=1e-12)
    assert stats["var_x"] == pytest.approx(1 / 24)
    assert stats["var_y"] == pytest.approx(1 / 24)
    assert stats["var_total"] == pytest.approx(1 / 12)
    assert stats["moments"] == pytest.approx([1 / 12, (1 / 12) ** 1.5, 1 / 144])


def test_position_stats_rejects_low_order(make_state):
    with pytest.raises(ValidationError):
        observables.position_stats(make_state(), max_moments=1)


def test_flat_state_has_no_curvature(make_state):
    state = make_state()
    assert observables.wells_in_ball(state) == 0
    assert observables.curvature_in_ball(state) == (0.0, 0.0)


def test_one_well_curvature(make_state):
    """Signed curvature cancels inside the ball; absolute does not."""
    state = make_state()
    state.grid.split_1to3(state.grid.origin)

    assert observables.wells_in_ball(state, 1.0) == 1
    signed, absolute = observables.curvature_in_ball(state, 1.0)
    assert signed == pytest.approx(0.0)
    assert absolute == pytest.approx(2 * math.pi)

    # The three corners sit at 1/sqrt(3) and drop out of a smaller ball.
    signed, absolute = observables.curvature_in_ball(state, 0.5)
    assert signed == pytest.approx(math.pi)
    assert absolute == pytest.approx(math.pi)


def test_radius_must_be_positive(make_state):
    with pytest.raises(ValidationError):
        observables.wells_in_ball(make_state(), 0.0)


def test_record_at_start(make_state):
    rec = observables.record(make_state(), radius=1.0, max_moments=3)
    assert rec.step == 0
    assert rec.norm == pytest.approx(1.0)
    assert rec.wells_in_ball == 0
    assert rec.var_total == pytest.approx(1 / 12)
    assert len(rec.moments) == 2
    assert rec.eta is None


def test_heatmap_bins_edge_midpoints(make_state):
    """Each edge midpoint lands in its own bin."""
    grid = observables.heatmap(make_state(), half_extent=1.0, bins=2)
    third = 1 / 3
    assert grid.shape == (2, 2)
    assert grid == pytest.approx(np.array([[0.0, third], [third, third]]))


def test_heatmap_clips_into_border_bins(make_state):
    grid = observables.heatmap(make_state(), half_extent=0.1, bins=1)
    assert grid.sum() == pytest.approx(1.0)


def test_heatmap_validates_arguments(make_state):
    with pytest.raises(ValidationError):
        observables.heatmap(make_state(), bins=0)
    with pytest.raises(ValidationError):
        observables.heatmap(make_state(), half_extent=-1.0)


def test_eta_of_power_law():
    series = observables.eta_series(_records([(t, 0.3 * t**2) for t in range(0, 12)]), window=5)
    assert [step for step, _ in series] == list(range(3, 10))
    assert all(eta == pytest.approx(2.0) for _, eta in series)


def test_eta_skips_unusable_records():
    records = _records([(0, 0.1), (1, 0.0), (2, 4.0), (3, 9.0), (4, 16.0)])
    series = observables.eta_series(records, window=3)
    assert series == [(3, pytest.approx(2.0))]


def test_eta_window_validation():
    with pytest.raises(ValidationError):
        observables.eta_series([], window=4)
    with pytest.raises(ValidationError):
        observables.eta_series([], window=1)
    assert observables.eta_series(_records([(1, 1.0), (2, 4.0)]), window=5) == []


def test_hyperballistic_steps():
    series = [(1, 2.5), (2, 1.9), (3, 2.3), (4, 2.1)]
    assert observables.hyperballistic_steps(series, after_step=1) == [3]


def test_well_tmax():
    assert observables.well_tmax([(0, 0), (1, 2), (2, 1), (3, 3), (4, 0)]) == 3
    assert observables.well_tmax([(0, 0), (1, 1)]) == 0


def test_fit_recovers_synthetic_curve():
    """An exact curve is recovered by the log-space fit."""
    series = [(t, 4.0 * t**1.5 * math.exp(-0.01 * t * t)) for t in range(1, 41)]
    fit = observables.fit_well_curve(series)
    assert not fit.degenerate
    assert fit.points == 40
    assert fit.a == pytest.approx(1.5, abs=1e-6)
    assert fit.b == pytest.approx(0.01, abs=1e-6)
    assert fit.c == pytest.approx(4.0, abs=1e-6)
    assert fit.residual == pytest.approx(0.0, abs=1e-12)
    assert fit.tmax == observables.well_tmax(series)


def test_fit_degenerate_with_few_positive_samples():
    fit = observables.fit_well_curve([(0, 1), (1, 1), (2, 2), (3, 0), (4, 1), (5, 1)])
    assert fit.degenerate
    assert fit.points == 4
    assert fit.tmax == 2
