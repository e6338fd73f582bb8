"""
Command-line interface for Pachner Walk.

This module provides the main CLI entry point using Click.
"""

import sys
from pathlib import Path

import click
import structlog
import yaml
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from pachner_walk import __version__
from pachner_walk.core.exceptions import PachnerWalkError
from pachner_walk.core.simulation import Simulation, run_sweep
from pachner_walk.utils.config import Config, RunConfig
from pachner_walk.utils.logger import setup_logging

logger = structlog.get_logger(__name__)


def _load_config(ctx: click.Context) -> Config:
    path = ctx.obj.get("config_path")
    config = Config.from_file(path) if path else Config({})
    if ctx.obj.get("log_level"):
        config.set("log_level", ctx.obj["log_level"])
    return config


def _parse_alphas(value: str) -> list[float]:
    try:
        return [float(part) for part in value.split(",") if part.strip()]
    except ValueError as e:
        raise click.BadParameter(f"expected comma-separated numbers: {e}") from e


@click.group()
@click.version_option(version=__version__)
@click.option(
    "--config",
    "-c",
    default=None,
    help="Path to configuration file (YAML or JSON); defaults apply when omitted",
)
@click.option(
    "--log-level",
    "-l",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Log level (overrides log_level from the configuration)",
)
@click.pass_context
def cli(ctx: click.Context, config: str | None, log_level: str | None) -> None:
    """
    Pachner Walk - quantum walk on a self-rewriting triangulated surface.

    \b
    Examples:
        pachner-walk run --alpha 1e-3 --steps 200 --out runs/a1e-3
        pachner-walk sweep --alphas 1e-4,1e-3,1e-2,1e-1
        pachner-walk doctor
    """
    setup_logging(level=log_level or "WARNING")
    ctx.ensure_object(dict)
    ctx.obj.update({"config_path": config, "log_level": log_level})


@cli.command()
@click.option("--path", default="pachner-walk.yaml", show_default=True, help="File to create")
@click.option("--force", is_flag=True, help="Overwrite an existing file")
def init(path: str, force: bool) -> None:
    """Write a configuration file holding every default."""
    target = Path(path)
    if target.exists() and not force:
        click.secho(f"Error: {path} already exists (use --force to overwrite)", fg="red", err=True)
        sys.exit(1)

    defaults = RunConfig().model_dump()
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8") as f:
        yaml.safe_dump(defaults, f, sort_keys=False)

    click.echo(f"✓ Version: {__version__}")
    click.echo(f"✓ Configuration written to {path}")
    click.echo("\nNext steps:")
    click.echo(f"  1. Edit {path} (alpha, steps, coins, ...)")
    click.echo(f"  2. Run 'pachner-walk --config {path} doctor' to verify the setup")
    click.echo(f"  3. Run 'pachner-walk --config {path} run'")


@cli.command()
@click.option("--out", "out_dir", help="Output directory")
@click.option("--steps", type=int, help="Number of steps")
@click.option("--alpha", type=float, help="1-to-3 threshold")
@click.option("--beta", help="3-to-1 threshold (number or '3*alpha')")
@click.option("--quiet", "-q", is_flag=True, help="Hide the progress bar")
@click.pass_context
def run(
    ctx: click.Context,
    out_dir: str | None,
    steps: int | None,
    alpha: float | None,
    beta: str | None,
    quiet: bool,
) -> None:
    """Run one simulation and write its outputs."""
    try:
        config = _load_config(ctx)
        for key, value in (("out_dir", out_dir), ("steps", steps), ("alpha", alpha), ("beta", beta)):
            if value is not None:
                config.set(key, value)
        sim = Simulation(config)
        total = sim.run_config.steps

        with Progress(
            TextColumn("[bold]stepping"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            disable=quiet,
            transient=True,
        ) as progress:
            task = progress.add_task("steps", total=total)
            result = sim.execute(on_step=lambda _: progress.advance(task))

        final = result.records[-1]
        click.secho(f"✓ {result.state.step_index} steps completed", fg="green")
        click.echo(f"  Regime: {sim.thresholds.regime.value}")
        click.echo(f"  Moves: {len(result.state.move_log)}")
        click.echo(f"  Norm: {final.norm:.12f}")
        click.echo(f"  Wells in ball: {final.wells_in_ball}")
        click.echo(f"  Outputs: {sim.run_config.out_dir}")

    except PachnerWalkError as e:
        click.secho(f"Error: {e.message}", fg="red", err=True)
        sys.exit(1)


@cli.command()
@click.option("--alphas", required=True, help="Comma-separated alphas, e.g. 1e-4,1e-3,1e-2")
@click.option("--steps", type=int, default=200, show_default=True, help="Steps per run")
@click.option("--out", "out_dir", help="Directory for sweep.csv")
@click.pass_context
def sweep(ctx: click.Context, alphas: str, steps: int, out_dir: str | None) -> None:
    """Fit the well curve for several alphas (beta = 3 * alpha)."""
    try:
        rows = run_sweep(_load_config(ctx), _parse_alphas(alphas), steps=steps, out_dir=out_dir)

        click.echo(f"\nSweep over {len(rows)} alpha value(s):\n")
        for alpha, fit in rows:
            if fit.degenerate:
                click.echo(f"  • alpha={alpha:g}: degenerate ({fit.points} positive samples)")
            else:
                click.echo(f"  • alpha={alpha:g}: a={fit.a:.4g}, b={fit.b:.4g}, c={fit.c:.4g}, tmax={fit.tmax}")

    except PachnerWalkError as e:
        click.secho(f"Error: {e.message}", fg="red", err=True)
        sys.exit(1)


@cli.command()
@click.option("--steps", type=int, default=20, show_default=True, help="Steps per check")
@click.pass_context
def doctor(ctx: click.Context, steps: int) -> None:
    """Check the engine against the lattice oracle and its invariants."""
    click.echo("Running diagnostics...\n")

    try:
        results = Simulation(_load_config(ctx)).self_check(steps)

        if results["status"] == "healthy":
            click.secho("✓ All checks passed", fg="green", bold=True)
        else:
            click.secho("⚠ Some checks failed", fg="yellow", bold=True)

        click.echo("\nChecks:")
        for check in results["checks"]:
            status_icon = "✓" if check["status"] == "healthy" else "✗"
            status_color = "green" if check["status"] == "healthy" else "red"
            click.secho(f"  {status_icon} {check['component']}: {check['message']}", fg=status_color)
            if "error" in check:
                click.echo(f"      code: {check['error']['code']}")

        if results["status"] != "healthy":
            sys.exit(1)

    except PachnerWalkError as e:
        click.secho(f"✗ Error: {e.message}", fg="red", err=True)
        sys.exit(1)


def main() -> None:
    """Main CLI entry point."""
    try:
        cli(obj={})
    except KeyboardInterrupt:
        click.echo("\n\nInterrupted by user")
        sys.exit(130)
    except Exception as e:
        logger.exception("Unexpected error")
        click.secho(f"Fatal error: {e}", fg="red", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
