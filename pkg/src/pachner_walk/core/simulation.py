"""
Run orchestration - entry point for the framework.

This module turns a configuration into a SimState, steps it while recording
observables, and writes the run's output files.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import structlog

from pachner_walk.core import observables
from pachner_walk.core.dynamics import SimState
from pachner_walk.core.exceptions import (
    InvariantViolationError,
    PachnerWalkError,
    ValidationError,
)
from pachner_walk.core.flat_oracle import flat_run, initial_flat_state
from pachner_walk.core.grid import Triangulation
from pachner_walk.core.models import FitResult, ObservableRecord, Thresholds
from pachner_walk.core.report import ReportGenerator
from pachner_walk.core.walker import (
    CoinSet,
    init_from_slots,
    init_origin_state,
    snapshot_records,
    total_norm,
)
from pachner_walk.storage.writers import RunWriter
from pachner_walk.utils.config import Config, RunConfig
from pachner_walk.utils.logger import setup_logging

logger = structlog.get_logger(__name__)

ORACLE_TOLERANCE = 1e-12
SWEEP_BETA_RATIO = 3.0


@dataclass
class RunResult:
    """Everything a finished run produced."""

    state: SimState
    records: list[ObservableRecord]
    fit: FitResult
    eta: list[tuple[int, float]] = field(default_factory=list)
    files: list[Path] = field(default_factory=list)


class Simulation:
    """
    Main entry point for Pachner Walk runs.

    Example:
        >>> sim = Simulation.from_config("pachner-walk.yaml")
        >>> result = sim.execute()
        >>> result.fit.b > 0
        True

    Attributes:
        config: Configuration object
        run_config: Validated run configuration
    """

    def __init__(self, config: Config, run_config: RunConfig | None = None) -> None:
        """
        Initialize Simulation.

        Args:
            config: Configuration object
            run_config: Already validated run configuration (skips env overrides)

        Raises:
            ConfigurationError: If configuration is invalid
            NonUnitaryCoinError: If a configured coin is not unitary
        """
        self.config = config
        self.run_config: RunConfig = run_config or config.run_config()
        self.coins = CoinSet.from_reals(self.run_config.coins.model_dump())
        self.thresholds = Thresholds(
            alpha=self.run_config.alpha, beta=self.run_config.resolved_beta()
        )

        setup_logging(level=self.run_config.log_level)
        logger.info(
            "Simulation initialized",
            alpha=self.thresholds.alpha,
            beta=self.thresholds.beta,
            regime=self.thresholds.regime.value,
        )

    @classmethod
    def from_config(cls, config_path: str | Path) -> Simulation:
        """
        Create a simulation from a YAML or JSON configuration file.

        Raises:
            ConfigurationError: If config file is missing or invalid
        """
        return cls(Config.from_file(config_path))

    @classmethod
    def from_dict(cls, config_dict: dict[str, Any]) -> Simulation:
        return cls(Config.from_dict(config_dict))

    def build_state(self) -> SimState:
        """Fresh flat triangulation carrying the configured initial field."""
        rc = self.run_config
        grid = Triangulation.new_flat(rc.initial_radius)
        if rc.initial_state == "origin-default":
            field_ = init_origin_state(grid)
        else:
            field_ = init_from_slots(
                grid,
                ((e.path, e.side, complex(e.re, e.im)) for e in rc.initial_state),  # type: ignore[union-attr]
            )
        return SimState(grid, field_, self.coins, self.thresholds, rc.assert_level)

    def execute(
        self,
        on_step: Callable[[SimState], None] | None = None,
        write_outputs: bool = True,
    ) -> RunResult:
        """
        Run the configured number of steps.

        Args:
            on_step: Called after every step (progress reporting)
            write_outputs: Write the output files into out_dir

        Returns:
            RunResult with records, fit and written files
        """
        rc = self.run_config
        state = self.build_state()
        writer = RunWriter(rc.out_dir) if write_outputs else None
        log = logger.bind(alpha=self.thresholds.alpha, beta=self.thresholds.beta)
        log.info("Run started", steps=rc.steps, regime=self.thresholds.regime.value)

        records = [observables.record(state, rc.ball_radius, rc.max_moments)]

        def after_step(s: SimState) -> None:
            records.append(observables.record(s, rc.ball_radius, rc.max_moments))
            if writer is not None:
                self._write_cadenced(writer, s)
            if on_step is not None:
                on_step(s)

        state.run(rc.steps, after_step)

        eta = observables.eta_series(records, rc.eta_window)
        eta_by_step = dict(eta)
        for rec in records:
            rec.eta = eta_by_step.get(rec.step)
        fit = observables.fit_well_curve([(r.step, r.wells_in_ball) for r in records])
        result = RunResult(state=state, records=records, fit=fit, eta=eta)

        log.info(
            "Run finished",
            steps=state.step_index,
            moves=len(state.move_log),
            norm=total_norm(state.field),
            triangles=state.grid.triangle_count,
        )

        if writer is not None:
            if rc.heatmap.every_n_steps == 0 or state.step_index % rc.heatmap.every_n_steps:
                writer.write_heatmap(
                    state.step_index,
                    observables.heatmap(state, rc.heatmap.half_extent, rc.heatmap.bins),
                )
            writer.write_timeseries(records)
            writer.write_movelog(state.move_log)
            writer.write_fit(fit)
            summary = ReportGenerator().render_summary(
                self.thresholds, state.step_index, records, state.move_log, fit
            )
            writer.write_text("summary.md", summary)
            result.files = list(writer.written)
            log.info("Outputs written", out_dir=str(writer.out_dir), files=len(result.files))
        return result

    def _write_cadenced(self, writer: RunWriter, state: SimState) -> None:
        rc = self.run_config
        t = state.step_index
        every = rc.heatmap.every_n_steps
        if every and t % every == 0:
            writer.write_heatmap(t, observables.heatmap(state, rc.heatmap.half_extent, rc.heatmap.bins))
        if rc.snapshot_every and t % rc.snapshot_every == 0:
            writer.write_graph(t, state.grid.snapshot())
            writer.write_field(t, _field_records(state))

    def self_check(self, steps: int = 20) -> dict[str, Any]:
        """
        Perform self-diagnostic checks.

        Runs the flat limit against the lattice oracle, then a short run with
        moves under full invariant checking.

        Returns:
            Dictionary with overall status and per-check results
        """
        results: dict[str, Any] = {"status": "healthy", "checks": []}

        def report(
            component: str, ok: bool, message: str, error: PachnerWalkError | None = None
        ) -> None:
            if not ok:
                results["status"] = "unhealthy"
            check: dict[str, Any] = {
                "component": component,
                "status": "healthy" if ok else "unhealthy",
                "message": message,
            }
            if error is not None:
                check.update(error.to_dict())
            results["checks"].append(check)

        try:
            deviation = oracle_deviation(self.coins, steps)
            report(
                "flat_limit",
                deviation <= ORACLE_TOLERANCE,
                f"max amplitude deviation from lattice oracle {deviation:.3e} over {steps} steps",
            )
        except PachnerWalkError as e:
            report("flat_limit", False, f"Flat-limit run failed: {e.message}", e)

        try:
            state = SimState.initial(self.thresholds, self.coins, assert_level="full")
            state.run(steps)
            report(
                "dynamics",
                True,
                f"{len(state.move_log)} moves, norm {total_norm(state.field):.12f}, invariants hold",
            )
        except PachnerWalkError as e:
            report("dynamics", False, f"Invariant check failed: {e.message}", e)

        return results


def _field_records(state: SimState) -> list[tuple[int, int, float, float]]:
    return snapshot_records(state.field, state.grid, state.coins)


def oracle_deviation(coins: CoinSet, steps: int) -> float:
    """Largest amplitude difference between a move-free run and the lattice oracle."""
    state = SimState.initial(Thresholds(alpha=1.0, beta=0.0), coins)
    state.run(steps)
    oracle = flat_run(initial_flat_state(coins), steps)

    engine: dict[Any, complex] = {}
    for (tri, k), value in state.field.items():
        cell = state.grid.cell_of(tri)
        if cell is None:
            raise InvariantViolationError("flat_limit", f"triangle {tri} was created by a move")
        engine[((cell.i, cell.j, cell.orientation.value), k)] = value
    keys = set(engine) | set(oracle.amplitudes)
    return max(
        (abs(engine.get(key, 0j) - oracle.amplitudes.get(key, 0j)) for key in keys), default=0.0
    )


def run_sweep(
    config: Config,
    alphas: Sequence[float],
    steps: int | None = None,
    out_dir: str | Path | None = None,
) -> list[tuple[float, FitResult]]:
    """
    Run every alpha with beta = 3 * alpha and write sweep.csv.

    beta is capped at 1, so alphas above 1/3 run with beta = 1.

    Raises:
        ValidationError: If an alpha is outside (0, 1]
    """
    for alpha in alphas:
        if not 0.0 < alpha <= 1.0:
            raise ValidationError("alphas", f"alpha must lie in (0, 1], got {alpha}")

    config.validate()
    base = config.to_dict()
    rows: list[tuple[float, FitResult]] = []
    for alpha in alphas:
        entry = dict(base, alpha=alpha, beta=min(SWEEP_BETA_RATIO * alpha, 1.0))
        if steps is not None:
            entry["steps"] = steps
        run_config = RunConfig(**entry)
        result = Simulation(Config(entry), run_config).execute(write_outputs=False)
        logger.info(
            "Sweep entry finished",
            alpha=alpha,
            b=result.fit.b,
            tmax=result.fit.tmax,
            degenerate=result.fit.degenerate,
        )
        rows.append((alpha, result.fit))

    RunWriter(out_dir if out_dir is not None else base["out_dir"]).write_sweep(rows)
    return rows
