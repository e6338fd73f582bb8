"""
Output files of a run.

CSV files carry a header row, '\\n' line endings and '.' decimals; floats are
written with 17 significant digits so identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np
import structlog

from pachner_walk.core.models import FitResult, MoveRecord, ObservableRecord

logger = structlog.get_logger(__name__)

TIMESERIES_COLUMNS = [
    "step",
    "norm",
    "wells_in_ball",
    "curvature_signed",
    "curvature_abs",
    "mean_x",
    "mean_y",
    "var_x",
    "var_y",
    "var_total",
    "eta",
]
MOVELOG_COLUMNS = ["step", "kind", "triangle_ids", "probability_at_trigger"]
FIELD_COLUMNS = ["triangle_id", "side", "re", "im"]
SWEEP_COLUMNS = ["alpha", "a", "b", "c", "tmax", "residual"]


def fmt(value: float | None) -> str:
    """Decimal text of a float with 17 significant digits; None becomes empty."""
    if value is None:
        return ""
    return format(float(value), ".17g")


def timeseries_row(record: ObservableRecord) -> list[str]:
    return [
        str(record.step),
        fmt(record.norm),
        str(record.wells_in_ball),
        fmt(record.curvature_signed),
        fmt(record.curvature_abs),
        fmt(record.mean_x),
        fmt(record.mean_y),
        fmt(record.var_x),
        fmt(record.var_y),
        fmt(record.var_total),
        fmt(record.eta),
    ]


def movelog_row(move: MoveRecord) -> list[str]:
    """step, kind, ';'-joined ids (split: parent;N1;N2;N3, merge: u;v;w;M), probability."""
    return [
        str(move.step),
        move.kind.value,
        ";".join(str(t) for t in move.triangle_ids),
        fmt(move.probability),
    ]


class RunWriter:
    """
    Writes the files of one run into an output directory.

    Example:
        >>> writer = RunWriter("runs/latest")
        >>> writer.write_fit(fit)
        PosixPath('runs/latest/fit.json')
    """

    def __init__(self, out_dir: str | Path) -> None:
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def _csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
        path = self.out_dir / name
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        self._track(path)
        return path

    def _json(self, name: str, payload: Any) -> Path:
        path = self.out_dir / name
        with open(path, "w", encoding="utf-8", newline="") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
        self._track(path)
        return path

    def _track(self, path: Path) -> None:
        self.written.append(path)
        logger.debug("Output written", path=str(path))

    def write_timeseries(self, records: Sequence[ObservableRecord]) -> Path:
        return self._csv("timeseries.csv", TIMESERIES_COLUMNS, (timeseries_row(r) for r in records))

    def write_movelog(self, moves: Sequence[MoveRecord]) -> Path:
        return self._csv("movelog.csv", MOVELOG_COLUMNS, (movelog_row(m) for m in moves))

    def write_heatmap(self, step: int, matrix: np.ndarray) -> Path:
        """bins rows of bins values, row-major, no header."""
        path = self.out_dir / f"heatmap_{step}.csv"
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerows([fmt(v) for v in row] for row in np.asarray(matrix))
        self._track(path)
        return path

    def write_graph(self, step: int, snapshot: dict[str, Any]) -> Path:
        return self._json(f"graph_{step}.json", snapshot)

    def write_field(self, step: int, records: Sequence[tuple[int, int, float, float]]) -> Path:
        return self._csv(
            f"field_{step}.csv",
            FIELD_COLUMNS,
            ([str(tri), str(side), fmt(re), fmt(im)] for tri, side, re, im in records),
        )

    def write_fit(self, fit: FitResult) -> Path:
        return self._json("fit.json", fit.model_dump())

    def write_sweep(self, rows: Sequence[tuple[float, FitResult]]) -> Path:
        return self._csv(
            "sweep.csv",
            SWEEP_COLUMNS,
            (
                [fmt(alpha), fmt(fit.a), fmt(fit.b), fmt(fit.c), str(fit.tmax), fmt(fit.residual)]
                for alpha, fit in rows
            ),
        )

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.write_text(text, encoding="utf-8")
        self._track(path)
        return path
