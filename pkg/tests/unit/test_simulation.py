"""
Unit tests for run orchestration.
"""

import math

import pytest

from pachner_walk.core.exceptions import (
    InvariantViolationError,
    NonUnitaryCoinError,
    ValidationError,
)
from pachner_walk.core.grid import Triangulation
from pachner_walk.core.simulation import Simulation, run_sweep
from pachner_walk.utils.config import Config


class TestSimulation:
    """Test suite for Simulation."""

    def test_execute_without_outputs(self):
        """A run returns one record per step plus the initial one."""
        sim = Simulation.from_dict({"alpha": 0.05, "steps": 10, "assert_level": "full"})

        result = sim.execute(write_outputs=False)

        assert [r.step for r in result.records] == list(range(11))
        assert result.files == []
        assert result.state.step_index == 10
        assert all(r.norm == pytest.approx(1.0, abs=1e-10) for r in result.records)
        assert result.records[0].var_total == pytest.approx(1 / 12)
        assert {step for step, _ in result.eta} == {r.step for r in result.records if r.eta is not None}

    def test_frozen_run_is_degenerate(self):
        """alpha = 1 and beta = 0 never move, so no wells are fitted."""
        sim = Simulation.from_dict({"alpha": 1.0, "beta": 0.0, "steps": 12})

        result = sim.execute(write_outputs=False)

        assert result.state.move_log == []
        assert result.fit.degenerate
        assert result.fit.tmax == 0

    def test_execute_writes_files(self, run_config_path):
        """Outputs land in out_dir and are listed on the result."""
        sim = Simulation.from_config(run_config_path)
        steps_seen = []

        result = sim.execute(on_step=lambda s: steps_seen.append(s.step_index))

        assert steps_seen == list(range(1, 9))
        names = {p.name for p in result.files}
        assert {"timeseries.csv", "movelog.csv", "fit.json", "summary.md"} <= names
        assert {"heatmap_4.csv", "heatmap_8.csv", "graph_8.json", "field_4.csv"} <= names
        assert all(p.exists() for p in result.files)

    def test_final_heatmap_written_when_off_cadence(self, tmp_path):
        """The last step always gets a heatmap."""
        sim = Simulation.from_dict(
            {
                "alpha": 1.0,
                "beta": 0.0,
                "steps": 5,
                "out_dir": str(tmp_path),
                "heatmap": {"half_extent": 4.0, "bins": 4, "every_n_steps": 2},
            }
        )

        sim.execute()

        assert sorted(p.name for p in tmp_path.glob("heatmap_*.csv")) == [
            "heatmap_2.csv",
            "heatmap_4.csv",
            "heatmap_5.csv",
        ]

    def test_explicit_initial_state(self):
        """initial_state entries are walked from the origin."""
        amp = 1 / math.sqrt(2)
        sim = Simulation.from_dict(
            {
                "alpha": 1.0,
                "beta": 0.0,
                "steps": 1,
                "initial_state": [
                    {"path": [], "side": 1, "re": amp},
                    {"path": [1], "side": 1, "im": amp},
                ],
            }
        )

        state = sim.build_state()

        origin = state.grid.origin
        assert state.field[(origin, 1)] == pytest.approx(amp)
        assert state.field[(state.grid.neighbor(origin, 1), 1)] == pytest.approx(1j * amp)

    def test_non_unitary_coin_rejected(self):
        """Configured coins must be unitary."""
        with pytest.raises(NonUnitaryCoinError):
            Simulation.from_dict({"coins": {"W": [1, 0, 1, 0, 1, 0, 1, 0]}})

    def test_self_check_healthy(self):
        """Diagnostics pass on the default configuration."""
        results = Simulation(Config({})).self_check(steps=8)

        assert results["status"] == "healthy"
        assert [c["component"] for c in results["checks"]] == ["flat_limit", "dynamics"]

    def test_self_check_reports_error_code(self, monkeypatch):
        """A failing check carries the error code and details of its exception."""

        def broken(coins, steps):
            raise InvariantViolationError("unitarity", "norm drifted", {"step": 3})

        monkeypatch.setattr("pachner_walk.core.simulation.oracle_deviation", broken)

        results = Simulation(Config({})).self_check(steps=4)

        assert results["status"] == "unhealthy"
        flat = results["checks"][0]
        assert flat["status"] == "unhealthy"
        assert flat["error"]["code"] == "INVARIANT_VIOLATION"
        assert flat["error"]["details"] == {"invariant": "unitarity", "step": 3}

    @pytest.mark.parametrize("level, shown", [("DEBUG", True), ("WARNING", False)])
    def test_configured_log_level_applies(self, capsys, level, shown):
        """Building a Simulation sets up logging at the configured level."""
        Simulation(Config({"log_level": level}))
        capsys.readouterr()

        Triangulation.new_flat(1.0)

        assert ("Flat grid created" in capsys.readouterr().err) is shown


class TestSweep:
    """Test suite for run_sweep."""

    def test_sweep_writes_rows(self, tmp_path):
        """One row per alpha, in the given order."""
        rows = run_sweep(Config({}), [1.0, 0.5], steps=4, out_dir=tmp_path)

        assert [alpha for alpha, _ in rows] == [1.0, 0.5]
        assert all(fit.degenerate for _, fit in rows)
        lines = (tmp_path / "sweep.csv").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 3

    def test_sweep_rejects_bad_alpha(self, tmp_path):
        """Alphas outside (0, 1] are rejected before anything runs."""
        with pytest.raises(ValidationError):
            run_sweep(Config({}), [0.1, 1.5], steps=4, out_dir=tmp_path)
        assert not (tmp_path / "sweep.csv").exists()
