"""
Run summary generation.

Renders a Markdown summary of a finished run from a Jinja2 template.
"""

from pathlib import Path
from typing import Any

import structlog
from jinja2 import Environment, FileSystemLoader, StrictUndefined, TemplateError

from pachner_walk.core.models import FitResult, MoveKind, MoveRecord, ObservableRecord, Thresholds

logger = structlog.get_logger(__name__)

DEFAULT_TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"
SUMMARY_TEMPLATE = "run_summary.md.j2"


class ReportGenerator:
    """
    Renders run summaries from templates.

    Example:
        >>> generator = ReportGenerator()
        >>> text = generator.render_summary(thresholds, steps, records, moves, fit)
    """

    def __init__(self, template_dir: str | Path | None = None) -> None:
        """
        Initialize ReportGenerator.

        Args:
            template_dir: Directory holding the templates (packaged ones by default)
        """
        self.template_dir = Path(template_dir) if template_dir else DEFAULT_TEMPLATE_DIR
        if self.template_dir.exists():
            self.jinja_env: Environment | None = Environment(
                loader=FileSystemLoader(str(self.template_dir)),
                autoescape=False,
                keep_trailing_newline=True,
                undefined=StrictUndefined,
            )
        else:
            logger.warning("Template directory not found", template_dir=str(self.template_dir))
            self.jinja_env = None

    def render_summary(
        self,
        thresholds: Thresholds,
        steps: int,
        records: list[ObservableRecord],
        moves: list[MoveRecord],
        fit: FitResult,
        extra: dict[str, Any] | None = None,
    ) -> str:
        """
        Render the run summary.

        Args:
            thresholds: Thresholds of the run
            steps: Number of steps performed
            records: Per-step observables
            moves: Move log
            fit: Well-curve fit
            extra: Additional template variables

        Returns:
            Markdown text
        """
        data = self._prepare_data(thresholds, steps, records, moves, fit)
        data.update(extra or {})

        if self.jinja_env is None:
            return self._get_fallback_summary(data)
        try:
            return self.jinja_env.get_template(SUMMARY_TEMPLATE).render(**data)
        except TemplateError as e:
            logger.warning("Failed to render summary template, using fallback", error=str(e))
            return self._get_fallback_summary(data)

    def _prepare_data(
        self,
        thresholds: Thresholds,
        steps: int,
        records: list[ObservableRecord],
        moves: list[MoveRecord],
        fit: FitResult,
    ) -> dict[str, Any]:
        final = records[-1] if records else None
        return {
            "alpha": thresholds.alpha,
            "beta": thresholds.beta,
            "regime": thresholds.regime.value,
            "steps": steps,
            "final": final.model_dump() if final else None,
            "peak_wells": max((r.wells_in_ball for r in records), default=0),
            "splits": sum(1 for m in moves if m.kind is MoveKind.SPLIT),
            "merges": sum(1 for m in moves if m.kind is MoveKind.MERGE),
            "fit": fit.model_dump(),
        }

    def _get_fallback_summary(self, data: dict[str, Any]) -> str:
        return (
            f"# Run summary\n\n"
            f"alpha = {data['alpha']:g}, beta = {data['beta']:g} ({data['regime']}), "
            f"{data['steps']} steps, {data['splits']} splits, {data['merges']} merges\n"
        )
