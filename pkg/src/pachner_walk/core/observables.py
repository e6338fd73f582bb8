"""
Measurements on a running simulation.

Well counts and curvature are read from the triangulation; position
statistics and heatmaps treat every slot as a point mass at the midpoint of
its edge, weighted by its physical probability.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
import structlog

from pachner_walk.core.dynamics import SimState
from pachner_walk.core.exceptions import ValidationError
from pachner_walk.core.models import FitResult, ObservableRecord
from pachner_walk.core.walker import physical_prob_array, total_norm

logger = structlog.get_logger(__name__)

MIN_FIT_POINTS = 5


def _check_radius(radius: float) -> None:
    if not radius > 0:
        raise ValidationError("radius", "must be positive")


def wells_in_ball(state: SimState, radius: float = 1.0) -> int:
    """Number of surviving well centers within radius of the initial origin centroid."""
    _check_radius(radius)
    grid = state.grid
    return sum(1 for v in grid.well_vertices if math.hypot(*grid.coords(v)) <= radius)


def curvature_in_ball(state: SimState, radius: float = 1.0) -> tuple[float, float]:
    """
    Signed and absolute deficit-angle sums over the ball.

    Returns:
        (signed, absolute), both in radians
    """
    _check_radius(radius)
    grid = state.grid
    signed = 0
    absolute = 0
    for v in grid.curved_vertices():
        if math.hypot(*grid.coords(v)) <= radius:
            units = grid.deficit_units(v)
            signed += units
            absolute += abs(units)
    return signed * math.pi / 3.0, absolute * math.pi / 3.0


def _weighted_points(state: SimState) -> tuple[np.ndarray, np.ndarray]:
    """Edge midpoints and physical probabilities of every slot with nonzero weight."""
    probs = physical_prob_array(state.field, state.grid, state.coins)
    support = probs > 0.0
    return state.grid.midpoint_array()[support], probs[support]


def position_stats(state: SimState, max_moments: int = 4) -> dict[str, float | list[float]]:
    """
    Mean, variances and central moments of the edge-midpoint distribution.

    moments[i] is E[|e - E[e]|^(i + 2)], so moments[0] equals var_total.
    """
    if max_moments < 2:
        raise ValidationError("max_moments", "must be at least 2")
    points, weights = _weighted_points(state)
    mass = float(weights.sum())
    if mass == 0.0:
        return {
            "mean_x": 0.0,
            "mean_y": 0.0,
            "var_x": 0.0,
            "var_y": 0.0,
            "var_total": 0.0,
            "moments": [0.0] * (max_moments - 1),
        }

    mean = weights @ points / mass
    centered = points - mean
    var_x = float(weights @ centered[:, 0] ** 2 / mass)
    var_y = float(weights @ centered[:, 1] ** 2 / mass)
    distance = np.hypot(centered[:, 0], centered[:, 1])
    moments = [float(weights @ distance**order / mass) for order in range(2, max_moments + 1)]
    return {
        "mean_x": float(mean[0]),
        "mean_y": float(mean[1]),
        "var_x": var_x,
        "var_y": var_y,
        "var_total": var_x + var_y,
        "moments": moments,
    }


def record(state: SimState, radius: float = 1.0, max_moments: int = 4) -> ObservableRecord:
    """All per-step measurements of the current state."""
    signed, absolute = curvature_in_ball(state, radius)
    return ObservableRecord(
        step=state.step_index,
        norm=total_norm(state.field),
        wells_in_ball=wells_in_ball(state, radius),
        curvature_signed=signed,
        curvature_abs=absolute,
        **position_stats(state, max_moments),
    )


def eta_series(records: Sequence[ObservableRecord], window: int = 5) -> list[tuple[int, float]]:
    """
    Windowed log-log slope of var_total against the step.

    Each value is the least-squares slope over `window` consecutive usable
    records centered on its step. Records at step 0 or with zero variance are
    skipped.
    """
    if window < 3 or window % 2 == 0:
        raise ValidationError("eta_window", "must be odd and at least 3")
    usable = [(r.step, r.var_total) for r in records if r.step >= 1 and r.var_total > 0.0]
    if len(usable) < window:
        return []

    log_t = np.log([float(step) for step, _ in usable])
    log_var = np.log([var for _, var in usable])
    half = window // 2
    series = []
    for center in range(half, len(usable) - half):
        lo, hi = center - half, center + half + 1
        slope = np.polyfit(log_t[lo:hi], log_var[lo:hi], 1)[0]
        series.append((usable[center][0], float(slope)))
    return series


def hyperballistic_steps(
    series: Sequence[tuple[int, float]], after_step: int = 0, tolerance: float = 0.2
) -> list[int]:
    """Steps after after_step where eta exceeds 2 + tolerance."""
    return [step for step, eta in series if step > after_step and eta > 2.0 + tolerance]


def heatmap(state: SimState, half_extent: float = 20.0, bins: int = 64) -> np.ndarray:
    """
    Probability binned on a square grid centered on the initial origin.

    Row r covers the r-th y band counted from -half_extent (y grows downward
    when printed); mass outside the square lands in the border bins.
    """
    if bins < 1:
        raise ValidationError("bins", "must be at least 1")
    if not half_extent > 0:
        raise ValidationError("half_extent", "must be positive")
    points, weights = _weighted_points(state)
    clipped = np.clip(points, -half_extent, half_extent)
    counts, _, _ = np.histogram2d(
        clipped[:, 0],
        clipped[:, 1],
        bins=bins,
        range=[[-half_extent, half_extent], [-half_extent, half_extent]],
        weights=weights,
    )
    return counts.T


def well_tmax(series: Sequence[tuple[int, int]]) -> int:
    """Last step with more than one well, 0 if there is none."""
    return max((step for step, wells in series if wells > 1), default=0)


def fit_well_curve(series: Sequence[tuple[int, int | float]]) -> FitResult:
    """
    Least-squares fit of wells(t) = c * t^a * exp(-b t^2) in log space.

    Only strictly positive samples at t >= 1 enter the fit; with fewer than
    five of them the result is flagged degenerate.
    """
    tmax = well_tmax(series)  # type: ignore[arg-type]
    positive = [(float(t), float(w)) for t, w in series if t >= 1 and w > 0]
    if len(positive) < MIN_FIT_POINTS:
        logger.debug("Well fit degenerate", points=len(positive))
        return FitResult(tmax=tmax, points=len(positive), degenerate=True)

    t = np.array([p[0] for p in positive])
    y = np.log([p[1] for p in positive])
    design = np.column_stack([np.log(t), -(t**2), np.ones_like(t)])
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sum((design @ coef - y) ** 2))
    return FitResult(
        a=float(coef[0]),
        b=float(coef[1]),
        c=float(np.exp(coef[2])),
        tmax=tmax,
        residual=residual,
        points=len(positive),
    )
