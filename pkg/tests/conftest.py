"""
Pytest configuration and fixtures.

This module provides reusable test fixtures for all tests.
"""

from collections.abc import Callable
from pathlib import Path

import pytest
import yaml

from pachner_walk.core.dynamics import SimState
from pachner_walk.core.grid import Triangulation
from pachner_walk.core.models import Thresholds
from pachner_walk.core.walker import CoinSet, Field, init_origin_state


@pytest.fixture
def coins() -> CoinSet:
    """Hadamard coin with identity gauges."""
    return CoinSet.default()


@pytest.fixture
def flat_grid() -> Triangulation:
    """Small flat triangulation around the origin."""
    return Triangulation.new_flat(2.0)


@pytest.fixture
def make_state(coins: CoinSet) -> Callable[..., SimState]:
    """Factory for a fresh SimState on a flat grid."""

    def _make(
        alpha: float = 1.0,
        beta: float = 0.0,
        field: Field | None = None,
        initial_radius: float = 3.0,
        assert_level: str = "full",
    ) -> SimState:
        grid = Triangulation.new_flat(initial_radius)
        return SimState(
            grid,
            field if field is not None else init_origin_state(grid),
            coins,
            Thresholds(alpha=alpha, beta=beta),
            assert_level,
        )

    return _make


@pytest.fixture
def run_config_path(tmp_path: Path) -> Path:
    """Minimal run configuration file writing into a temporary directory."""
    config_path = tmp_path / "pachner-walk.yaml"
    with open(config_path, "w", encoding="utf-8") as f:
        yaml.safe_dump(
            {
                "alpha": 0.05,
                "beta": "3*alpha",
                "steps": 8,
                "out_dir": str(tmp_path / "out"),
                "heatmap": {"half_extent": 5.0, "bins": 8, "every_n_steps": 4},
                "snapshot_every": 4,
                "assert_level": "full",
                "log_level": "WARNING",
            },
            f,
        )
    return config_path
