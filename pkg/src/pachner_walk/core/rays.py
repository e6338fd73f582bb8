"""
Line extents for the outward translation rays.

On the flat lattice a ray with external side j and internal side k moves two
cells per hop and comes back to the orientation it started from, so the flat
cells it stands on lie on one lattice line, a fixed step apart. Past the last
nonzero side-k slot and the last retired cell of that line every further
shift swaps zeros across flat cells, which is the identity. RayExtents keeps
that furthest position per line so a ray can stop there.
"""

from __future__ import annotations

import numpy as np
import structlog

from pachner_walk.core.grid import ORIENT_DOWN, ORIENT_UP, Triangulation, cell_neighbor
from pachner_walk.core.models import Cell, Orientation, SideIndex, TriangleId, other_sides
from pachner_walk.core.walker import Field

logger = structlog.get_logger(__name__)

# Lattice step of one ray hop from an up cell; down cells move the opposite way.
RAY_STEPS: dict[tuple[SideIndex, SideIndex], tuple[int, int]] = {
    (1, 2): (1, 0),
    (2, 1): (-1, 0),
    (1, 3): (0, 1),
    (3, 1): (0, -1),
    (2, 3): (-1, 1),
    (3, 2): (1, -1),
}

LineKey = tuple[int, SideIndex, SideIndex, int]


def ray_step(orientation: int, j: SideIndex, k: SideIndex) -> tuple[int, int]:
    """Lattice displacement of one (j, k) hop from a flat cell of the given orientation."""
    di, dj = RAY_STEPS[(j, k)]
    return (di, dj) if orientation == ORIENT_UP else (-di, -dj)


def line_coordinates(
    i: np.ndarray | int, j: np.ndarray | int, step: tuple[int, int]
) -> tuple[np.ndarray | int, np.ndarray | int]:
    """(line id, position) of cells along step; position grows by one hop per hop."""
    di, dj = step
    return i * dj - j * di, (i * di + j * dj) // (di * di + dj * dj)


def _orientation_code(cell: Cell) -> int:
    return ORIENT_UP if cell.orientation is Orientation.UP else ORIENT_DOWN


class RayExtents:
    """
    Furthest interesting position on every ray line.

    A position is interesting when its side-k slot is nonzero or when the
    ray would step onto a retired lattice cell from there (on the cell itself
    or on the cell crossed in between). Built from the grid and field once per
    batch of merges; deposits made by rays are recorded with note(). Entries
    going stale only make rays walk further than needed.

    Example:
        >>> extents = RayExtents(grid, field)
        >>> extents.ray_can_stop(tri, 1, 2)
        True
    """

    def __init__(self, grid: Triangulation, field: Field) -> None:
        self._grid = grid
        self._tables: dict[tuple[int, SideIndex, SideIndex], tuple[np.ndarray, np.ndarray]] = {}
        self._noted: dict[LineKey, int] = {}

        ij, orient = grid.cell_arrays()
        amps = field.array(grid.size)
        retired = sorted(grid.retired_cells())
        for orientation in (ORIENT_UP, ORIENT_DOWN):
            for j, k in RAY_STEPS:
                rows = np.flatnonzero((orient == orientation) & (amps[:, k - 1] != 0))
                points = [ij[rows]]
                blockers = [
                    # A retired cell of the other orientation blocks the cell
                    # that reaches it across side j.
                    cell if _orientation_code(cell) == orientation else cell_neighbor(cell, j)
                    for cell in retired
                ]
                if blockers:
                    points.append(np.array([(c.i, c.j) for c in blockers], dtype=np.int64))
                self._tables[(orientation, j, k)] = self._furthest_by_line(
                    np.concatenate(points), ray_step(orientation, j, k)
                )
        logger.debug("Ray extents built", lines=sum(len(t[0]) for t in self._tables.values()))

    @staticmethod
    def _furthest_by_line(
        points: np.ndarray, step: tuple[int, int]
    ) -> tuple[np.ndarray, np.ndarray]:
        if len(points) == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        lines, positions = line_coordinates(points[:, 0], points[:, 1], step)
        order = np.lexsort((positions, lines))
        lines, positions = lines[order], positions[order]
        last = np.append(lines[1:] != lines[:-1], True)
        return lines[last], positions[last]

    def _locate(self, tri: TriangleId, j: SideIndex, k: SideIndex) -> tuple[LineKey, int] | None:
        cell = self._grid.cell_of(tri)
        if cell is None:
            return None
        orientation = _orientation_code(cell)
        line, position = line_coordinates(cell.i, cell.j, ray_step(orientation, j, k))
        return (orientation, j, k, int(line)), int(position)

    def furthest(self, key: LineKey) -> int | None:
        """Furthest interesting position on a line, None if the line holds nothing."""
        orientation, j, k, line = key
        lines, positions = self._tables[(orientation, j, k)]
        index = int(np.searchsorted(lines, line))
        found = int(positions[index]) if index < len(lines) and lines[index] == line else None
        noted = self._noted.get(key)
        if found is None or noted is None:
            return noted if found is None else found
        return max(found, noted)

    def ray_can_stop(self, tri: TriangleId, j: SideIndex, k: SideIndex) -> bool:
        """True if tri is a flat cell past everything the (j, k) ray could still move."""
        located = self._locate(tri, j, k)
        if located is None:
            return False
        key, position = located
        furthest = self.furthest(key)
        return furthest is None or position > furthest

    def note(self, tri: TriangleId, k: SideIndex) -> None:
        """Record a nonzero amplitude placed on slot (tri, k)."""
        for j in other_sides(k):
            located = self._locate(tri, j, k)
            if located is None:
                return
            key, position = located
            self._noted[key] = max(position, self._noted.get(key, position))
