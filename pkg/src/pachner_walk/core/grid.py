"""
Labeled triangulated surface.

The surface is stored in its dual-graph view: every triangle has a stable id,
a label from SIGMA, three neighbors indexed by side (gluings always join side
k to side k), and three corners, corner k being opposite side k. The flat
triangular lattice is materialized lazily around whatever the simulation
touches, so the surface behaves as the infinite grid while only a finite part
of it exists in memory.

Example:
    >>> grid = Triangulation.new_flat(2.0)
    >>> n1, n2, n3 = grid.split_1to3(grid.origin)
    >>> grid.find_3cycles()
    [(n2, n3, n1)]
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Iterable, Iterator
from typing import Any

import numpy as np
import structlog

from pachner_walk.core.exceptions import (
    InvariantViolationError,
    NotACycleError,
    TriangleNotFoundError,
    ValidationError,
    VertexNotFoundError,
)
from pachner_walk.core.models import (
    DOWN_LABEL,
    SIDES,
    SIGMA,
    UP_LABEL,
    Cell,
    Cycle,
    Orientation,
    SideIndex,
    Slot,
    Spin,
    TriangleId,
    TriLabel,
    VertexId,
    check_side,
    other_sides,
    side_add,
)

logger = structlog.get_logger(__name__)

SQRT3 = math.sqrt(3.0)
FLAT_INCIDENCE = 6
WELL_INCIDENCE = 3

# Orientation codes of the per-triangle arrays; ORIENT_NONE marks anything but a live flat cell.
ORIENT_DOWN = 0
ORIENT_UP = 1
ORIENT_NONE = -1
_MIN_CAPACITY = 64

# Lattice offsets of corners 1, 2, 3 (corner k is opposite side k).
_UP_CORNERS = ((0, 0), (1, 0), (0, 1))
_DOWN_CORNERS = ((1, 1), (0, 1), (1, 0))

# Cell offset of the neighbor across side k; up cells border down cells only.
_UP_NEIGHBORS = {1: (0, 0), 2: (-1, 0), 3: (0, -1)}
_DOWN_NEIGHBORS = {1: (0, 0), 2: (1, 0), 3: (0, 1)}


def lattice_point(i: float, j: float) -> tuple[float, float]:
    """Cartesian position of lattice coordinates, origin cell centroid at (0, 0)."""
    return (i + 0.5 * j - 0.5, 0.5 * SQRT3 * j - SQRT3 / 6.0)


def cell_neighbor(cell: Cell, k: SideIndex) -> Cell:
    """Lattice cell across side k of the given cell."""
    if cell.orientation is Orientation.UP:
        di, dj = _UP_NEIGHBORS[k]
        return Cell(cell.i + di, cell.j + dj, Orientation.DOWN)
    di, dj = _DOWN_NEIGHBORS[k]
    return Cell(cell.i + di, cell.j + dj, Orientation.UP)


def cell_corner_points(cell: Cell) -> tuple[tuple[int, int], ...]:
    """Lattice points of corners 1, 2, 3 of a cell."""
    offsets = _UP_CORNERS if cell.orientation is Orientation.UP else _DOWN_CORNERS
    return tuple((cell.i + di, cell.j + dj) for di, dj in offsets)


def cell_centroid(cell: Cell) -> tuple[float, float]:
    third = 1.0 / 3.0 if cell.orientation is Orientation.UP else 2.0 / 3.0
    return lattice_point(cell.i + third, cell.j + third)


class Triangulation:
    """
    Dual-graph view of a labeled triangulated surface.

    Triangles created by moves are tracked separately from flat lattice cells;
    only they can take part in 3-cycles. Alongside the dictionaries the grid
    keeps numpy rows indexed by triangle id (neighbors, up-spin flags, slot
    midpoints, lattice cells) for the vectorized walk substeps.

    Attributes:
        origin: Distinguished triangle anchoring addressing and the initial state
    """

    def __init__(self) -> None:
        self._next_triangle = 0
        self._next_vertex = 0
        self._adjacency: dict[TriangleId, list[TriangleId | None]] = {}
        self._labels: dict[TriangleId, TriLabel] = {}
        self._corners: dict[TriangleId, tuple[VertexId, VertexId, VertexId]] = {}
        self._coords: dict[VertexId, tuple[float, float]] = {}
        self._incidence: dict[VertexId, int] = {}
        self._curved: set[VertexId] = set()
        self._well_vertices: set[VertexId] = set()
        self._well_parent_cell: dict[VertexId, Cell | None] = {}
        self._cell_of: dict[TriangleId, Cell] = {}
        self._cells: dict[Cell, TriangleId] = {}
        self._retired_cells: set[Cell] = set()
        self._lattice_vertices: dict[tuple[int, int], VertexId] = {}
        self._moved: set[TriangleId] = set()
        self._nbr = np.full((0, 3), -1, dtype=np.int64)
        self._up = np.zeros((0, 3), dtype=bool)
        self._mid = np.zeros((0, 3, 2))
        self._cell_ij = np.zeros((0, 2), dtype=np.int64)
        self._orient = np.full(0, ORIENT_NONE, dtype=np.int8)
        self._live = np.zeros(0, dtype=bool)
        self.origin: TriangleId = TriangleId(-1)

    @classmethod
    def new_flat(cls, initial_radius: float = 2.0) -> Triangulation:
        """
        Create the alternating flat grid around an up-labeled origin triangle.

        Args:
            initial_radius: Euclidean radius around the origin centroid to materialize

        Returns:
            Triangulation whose origin is labeled (up, up, up)

        Raises:
            ValidationError: If initial_radius is not positive
        """
        if not initial_radius > 0:
            raise ValidationError("initial_radius", "must be positive")

        grid = cls()
        start = Cell(0, 0, Orientation.UP)
        grid.origin = grid._create_cell(start)
        queue = deque([start])
        seen = {start}
        while queue:
            cell = queue.popleft()
            for k in SIDES:
                nxt = cell_neighbor(cell, k)
                if nxt in seen:
                    continue
                seen.add(nxt)
                if math.hypot(*cell_centroid(nxt)) <= initial_radius:
                    grid._create_cell(nxt)
                    queue.append(nxt)

        logger.debug("Flat grid created", triangles=len(grid._labels), radius=initial_radius)
        return grid

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def is_live(self, tri: TriangleId) -> bool:
        return tri in self._labels

    def triangles(self) -> Iterator[TriangleId]:
        """Iterate over live (materialized) triangles in id order."""
        return iter(sorted(self._labels))

    @property
    def triangle_count(self) -> int:
        return len(self._labels)

    @property
    def well_vertices(self) -> frozenset[VertexId]:
        return frozenset(self._well_vertices)

    @property
    def size(self) -> int:
        """Number of triangle ids handed out so far; every array row below it is valid."""
        return self._next_triangle

    def neighbor_array(self) -> np.ndarray:
        """(size, 3) neighbor ids by side, -1 where unglued or retired."""
        return self._nbr[: self._next_triangle]

    def up_array(self) -> np.ndarray:
        """(size, 3) True where the slot carries spin up; all False for retired rows."""
        return self._up[: self._next_triangle]

    def midpoint_array(self) -> np.ndarray:
        """(size, 3, 2) edge midpoint of every slot."""
        return self._mid[: self._next_triangle]

    def live_array(self) -> np.ndarray:
        return self._live[: self._next_triangle]

    def cell_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Lattice (i, j) per row and orientation code (ORIENT_UP, ORIENT_DOWN or ORIENT_NONE)."""
        n = self._next_triangle
        return self._cell_ij[:n], self._orient[:n]

    def retired_cells(self) -> frozenset[Cell]:
        """Lattice cells currently replaced by triangles created by moves."""
        return frozenset(self._retired_cells)

    def label(self, tri: TriangleId) -> TriLabel:
        try:
            return self._labels[tri]
        except KeyError:
            raise TriangleNotFoundError(tri) from None

    def spin(self, slot: Slot) -> Any:
        """Spin carried by a slot, determined by its triangle's label."""
        tri, k = slot
        return self.label(tri)[k - 1]

    def corners(self, tri: TriangleId) -> tuple[VertexId, VertexId, VertexId]:
        try:
            return self._corners[tri]
        except KeyError:
            raise TriangleNotFoundError(tri) from None

    def coords(self, v: VertexId) -> tuple[float, float]:
        try:
            return self._coords[v]
        except KeyError:
            raise VertexNotFoundError(v) from None

    def incidence(self, v: VertexId) -> int:
        try:
            return self._incidence[v]
        except KeyError:
            raise VertexNotFoundError(v) from None

    def vertices(self) -> Iterator[VertexId]:
        return iter(sorted(self._coords))

    def cell_of(self, tri: TriangleId) -> Cell | None:
        """Lattice cell of a flat triangle, None for triangles created by moves."""
        self._require_live(tri)
        return self._cell_of.get(tri)

    def glued(self, tri: TriangleId, k: SideIndex) -> TriangleId | None:
        """Neighbor across side k if already materialized, without materializing."""
        try:
            return self._adjacency[tri][k - 1]
        except KeyError:
            raise TriangleNotFoundError(tri) from None

    def neighbor(self, tri: TriangleId, k: SideIndex) -> TriangleId:
        """Neighbor across side k, materializing flat grid as needed."""
        try:
            nb = self._adjacency[tri][k - 1]
        except KeyError:
            raise TriangleNotFoundError(tri) from None
        if nb is None:
            self.ensure_materialized(tri)
            nb = self._adjacency[tri][k - 1]
        return nb  # type: ignore[return-value]

    def walk_path(self, path: Iterable[int]) -> TriangleId:
        """Follow a sequence of sides from the origin."""
        tri = self.origin
        for k in path:
            tri = self.neighbor(tri, check_side(k))
        return tri

    # ------------------------------------------------------------------
    # Geometry and curvature
    # ------------------------------------------------------------------

    def centroid(self, tri: TriangleId) -> tuple[float, float]:
        a, b, c = (self._coords[v] for v in self.corners(tri))
        return ((a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0)

    def slot_position(self, slot: Slot) -> tuple[float, float]:
        """Midpoint of the edge underlying a slot (side k joins corners k+1, k+2)."""
        tri, k = slot
        self._require_live(tri)
        x, y = self._mid[tri, k - 1]
        return (float(x), float(y))

    def deficit_units(self, v: VertexId) -> int:
        """Deficit angle of a vertex in exact units of pi/3."""
        return FLAT_INCIDENCE - self.incidence(v)

    def vertex_deficit(self, v: VertexId) -> float:
        """Deficit angle 2*pi - n*pi/3 for a vertex shared by n triangles."""
        return self.deficit_units(v) * math.pi / 3.0

    def curved_vertices(self) -> frozenset[VertexId]:
        """Vertices whose incidence differs from the flat value."""
        return frozenset(self._curved)

    def global_deficit_units(self) -> int:
        """Signed deficit summed over every vertex, in units of pi/3."""
        return sum(FLAT_INCIDENCE - self._incidence[v] for v in self._curved)

    # ------------------------------------------------------------------
    # Materialization
    # ------------------------------------------------------------------

    def ensure_materialized(self, tri: TriangleId) -> None:
        """
        Make sure all three neighbors of a triangle exist.

        Only flat cells can have missing neighbors; triangles created by moves
        are always fully glued.

        Raises:
            TriangleNotFoundError: If tri is not live
        """
        adjacency = self._adjacency.get(tri)
        if adjacency is None:
            raise TriangleNotFoundError(tri)
        if None not in adjacency:
            return

        cell = self._cell_of.get(tri)
        if cell is None:
            raise InvariantViolationError(
                "materialized_moves",
                f"triangle {tri} was created by a move but has an open side",
                details={"triangle_id": tri},
            )
        for k in SIDES:
            if adjacency[k - 1] is not None:
                continue
            nb_cell = cell_neighbor(cell, k)
            nb = self._cells.get(nb_cell)
            if nb is None:
                self._create_cell(nb_cell)
            else:
                self._glue(tri, nb, k)

    def _create_cell(self, cell: Cell) -> TriangleId:
        if cell in self._cells or cell in self._retired_cells:
            raise InvariantViolationError(
                "lazy_materialization",
                f"lattice cell {tuple(cell)} was already materialized",
            )
        tri = self._new_triangle()
        a, b, c = (self._lattice_vertex(p) for p in cell_corner_points(cell))
        self._assign(tri, UP_LABEL if cell.orientation is Orientation.UP else DOWN_LABEL, (a, b, c))
        self._set_cell(tri, cell)
        for k in SIDES:
            nb = self._cells.get(cell_neighbor(cell, k))
            if nb is not None:
                self._glue(tri, nb, k)
        return tri

    def _lattice_vertex(self, point: tuple[int, int]) -> VertexId:
        v = self._lattice_vertices.get(point)
        if v is None:
            # The infinite flat grid already surrounds every lattice vertex.
            v = self._new_vertex(lattice_point(*point), FLAT_INCIDENCE)
            self._lattice_vertices[point] = v
        return v

    def _new_triangle(self) -> TriangleId:
        tri = TriangleId(self._next_triangle)
        if tri >= len(self._live):
            self._grow(max(_MIN_CAPACITY, 2 * len(self._live)))
        self._next_triangle += 1
        self._adjacency[tri] = [None, None, None]
        return tri

    def _grow(self, capacity: int) -> None:
        extra = capacity - len(self._live)
        self._nbr = np.concatenate([self._nbr, np.full((extra, 3), -1, dtype=np.int64)])
        self._up = np.concatenate([self._up, np.zeros((extra, 3), dtype=bool)])
        self._mid = np.concatenate([self._mid, np.zeros((extra, 3, 2))])
        self._cell_ij = np.concatenate([self._cell_ij, np.zeros((extra, 2), dtype=np.int64)])
        self._orient = np.concatenate([self._orient, np.full(extra, ORIENT_NONE, dtype=np.int8)])
        self._live = np.concatenate([self._live, np.zeros(extra, dtype=bool)])

    def _assign(
        self, tri: TriangleId, label: TriLabel, corners: tuple[VertexId, VertexId, VertexId]
    ) -> None:
        """Set label and corners of a triangle, keeping the array rows in step."""
        self._labels[tri] = label
        self._corners[tri] = corners
        self._up[tri] = [s is Spin.UP for s in label]
        points = np.array([self._coords[v] for v in corners])
        # Side k joins corners k+1 and k+2.
        self._mid[tri] = (points[[1, 2, 0]] + points[[2, 0, 1]]) / 2.0
        self._live[tri] = True

    def _set_cell(self, tri: TriangleId, cell: Cell) -> None:
        self._cell_of[tri] = cell
        self._cells[cell] = tri
        self._cell_ij[tri] = (cell.i, cell.j)
        self._orient[tri] = ORIENT_UP if cell.orientation is Orientation.UP else ORIENT_DOWN

    def _new_vertex(self, xy: tuple[float, float], incidence: int) -> VertexId:
        v = VertexId(self._next_vertex)
        self._next_vertex += 1
        self._coords[v] = xy
        self._set_incidence(v, incidence)
        return v

    def _set_incidence(self, v: VertexId, n: int) -> None:
        self._incidence[v] = n
        if n == FLAT_INCIDENCE:
            self._curved.discard(v)
        else:
            self._curved.add(v)

    def _glue(self, a: TriangleId, b: TriangleId, k: SideIndex) -> None:
        self._adjacency[a][k - 1] = b
        self._adjacency[b][k - 1] = a
        self._nbr[a, k - 1] = b
        self._nbr[b, k - 1] = a

    def _require_live(self, tri: TriangleId) -> None:
        if tri not in self._labels:
            raise TriangleNotFoundError(tri)

    def _retire_triangle(self, tri: TriangleId) -> None:
        del self._adjacency[tri]
        del self._labels[tri]
        del self._corners[tri]
        self._moved.discard(tri)
        self._nbr[tri] = -1
        self._up[tri] = False
        self._live[tri] = False
        self._orient[tri] = ORIENT_NONE
        cell = self._cell_of.pop(tri, None)
        if cell is not None:
            del self._cells[cell]
            self._retired_cells.add(cell)

    # ------------------------------------------------------------------
    # Pachner moves
    # ------------------------------------------------------------------

    def split_1to3(self, tri: TriangleId) -> tuple[TriangleId, TriangleId, TriangleId]:
        """
        Replace a triangle by three triangles around a new center vertex.

        N_j keeps side j of the parent; internal gluings are (N2, N3) on side 1,
        (N3, N1) on side 2 and (N1, N2) on side 3. N1 inherits the parent label
        and, if the parent was the origin, the origin role.

        Returns:
            (N1, N2, N3)

        Raises:
            TriangleNotFoundError: If tri is not live
        """
        self._require_live(tri)
        self.ensure_materialized(tri)

        label = self._labels[tri]
        outer = list(self._adjacency[tri])
        parent_corners = self._corners[tri]
        a, b, c = (self._coords[v] for v in parent_corners)
        center = self._new_vertex(
            ((a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0),
            WELL_INCIDENCE,
        )
        self._well_vertices.add(center)
        self._well_parent_cell[center] = self._cell_of.get(tri)
        was_origin = tri == self.origin

        self._retire_triangle(tri)

        n1, n2, n3 = new = (self._new_triangle(), self._new_triangle(), self._new_triangle())
        labels = (label, label.flipped(3), label.flipped(1, 2))

        for j, nj, child_label in zip(SIDES, new, labels, strict=True):
            corners: list[VertexId] = [center, center, center]
            # Side j keeps the parent's edge; the two other corners swap places.
            corners[side_add(j, 1) - 1] = parent_corners[side_add(j, 2) - 1]
            corners[side_add(j, 2) - 1] = parent_corners[side_add(j, 1) - 1]
            self._assign(nj, child_label, (corners[0], corners[1], corners[2]))
            self._glue(nj, outer[j - 1], j)  # type: ignore[arg-type]

        self._glue(n2, n3, 1)
        self._glue(n3, n1, 2)
        self._glue(n1, n2, 3)
        self._moved.update(new)

        for v in parent_corners:
            self._set_incidence(v, self._incidence[v] + 1)

        if was_origin:
            self.origin = n1
        return n1, n2, n3

    def merge_3to1(self, cycle: Cycle) -> TriangleId:
        """
        Replace a 3-cycle by a single triangle.

        The merged triangle's side j is the external side j of the member whose
        external side is j, and it carries that member's spin there.

        Returns:
            Id of the merged triangle

        Raises:
            NotACycleError: If the triangles are not a 3-cycle
            InvariantViolationError: If the merged label is not in SIGMA
        """
        by_side = self._external_sides(cycle)
        if by_side is None:
            raise NotACycleError(tuple(cycle))

        common = set(self._corners[cycle[0]])
        for member in cycle[1:]:
            common &= set(self._corners[member])
        if len(common) != 1:
            raise NotACycleError(tuple(cycle))
        center = common.pop()
        if self._incidence[center] != WELL_INCIDENCE:
            raise InvariantViolationError(
                "well_center",
                f"center vertex {center} has incidence {self._incidence[center]}",
                details={"vertex_id": center, "cycle": list(cycle)},
            )

        label = TriLabel(*(self._labels[by_side[j]].spin(j) for j in SIDES))
        if label not in SIGMA:
            raise InvariantViolationError(
                "label_in_sigma",
                f"merged label {label.code} is not a legal label",
                details={"cycle": list(cycle)},
            )

        outer_vertices = set()
        for member in cycle:
            outer_vertices.update(self._corners[member])
        outer_vertices.discard(center)

        merged_corners: list[VertexId] = []
        for j in SIDES:
            (opposite,) = outer_vertices - set(self._corners[by_side[j]])
            merged_corners.append(opposite)
        outer = [self._adjacency[by_side[j]][j - 1] for j in SIDES]
        was_origin = self.origin in cycle

        for member in cycle:
            self._retire_triangle(member)

        merged = self._new_triangle()
        self._assign(merged, label, (merged_corners[0], merged_corners[1], merged_corners[2]))
        for j in SIDES:
            self._glue(merged, outer[j - 1], j)  # type: ignore[arg-type]

        parent_cell = self._well_parent_cell.pop(center, None)
        if parent_cell is not None:
            self._retired_cells.discard(parent_cell)
            self._set_cell(merged, parent_cell)
        else:
            self._moved.add(merged)

        del self._coords[center]
        del self._incidence[center]
        self._curved.discard(center)
        self._well_vertices.discard(center)
        for v in merged_corners:
            self._set_incidence(v, self._incidence[v] - 1)

        if was_origin:
            self.origin = merged
        return merged

    def _external_sides(self, cycle: Iterable[TriangleId]) -> dict[SideIndex, TriangleId] | None:
        """Map external side -> member if the triangles form a 3-cycle, else None."""
        members = tuple(cycle)
        if len(members) != 3 or len(set(members)) != 3:
            return None
        if any(m not in self._labels for m in members):
            return None

        by_side: dict[SideIndex, TriangleId] = {}
        for member in members:
            adjacency = self._adjacency[member]
            external = [k for k in SIDES if adjacency[k - 1] not in members]
            internal = [adjacency[k - 1] for k in SIDES if adjacency[k - 1] in members]
            if len(external) != 1 or len(set(internal)) != 2:
                return None
            by_side[external[0]] = member
        if len(by_side) != 3:
            return None
        return by_side

    def is_3cycle(self, cycle: Iterable[TriangleId]) -> bool:
        return self._external_sides(cycle) is not None

    def external_side(self, member: TriangleId, cycle: Cycle) -> SideIndex:
        """External side of a cycle member."""
        by_side = self._external_sides(cycle)
        if by_side is None:
            raise NotACycleError(tuple(cycle))
        for k, m in by_side.items():
            if m == member:
                return k
        raise NotACycleError(tuple(cycle))

    def canonical_cycle(self, cycle: Iterable[TriangleId]) -> Cycle:
        """
        Order a 3-cycle as (u, v, w) with (u, v) glued on side 1, (v, w) on side 2
        and (w, u) on side 3, i.e. external sides 2, 3, 1.
        """
        members = tuple(cycle)
        by_side = self._external_sides(members)
        if by_side is None:
            raise NotACycleError(members)
        return (by_side[2], by_side[3], by_side[1])

    def find_3cycles(self) -> list[Cycle]:
        """
        All 3-cycles of the dual graph in canonical order.

        Only triangles created by moves are searched: the flat grid has none.
        """
        found: set[frozenset[TriangleId]] = set()
        cycles: list[Cycle] = []
        for tri in sorted(self._moved):
            adjacency = self._adjacency[tri]
            for ext in SIDES:
                a, b = other_sides(ext)
                x, y = adjacency[a - 1], adjacency[b - 1]
                if x is None or y is None:
                    continue
                if self._adjacency[x][ext - 1] != y:
                    continue
                key = frozenset((tri, x, y))
                if key in found or not self.is_3cycle(key):
                    continue
                found.add(key)
                cycles.append(self.canonical_cycle(key))
        return cycles

    # ------------------------------------------------------------------
    # Invariants, signatures, export
    # ------------------------------------------------------------------

    def check_invariants(self, scope: Iterable[TriangleId] | None = None) -> None:
        """
        Assert the structural invariants of the labeled surface.

        Checks the once-per-side rule on every mutually glued triple, gluing
        involution, spin complementarity (hence distinct labels across every
        edge), SIGMA membership and exact Gauss-Bonnet.

        Args:
            scope: Triangles to check edge by edge (all live triangles if None);
                triples and curvature are always checked in full

        Raises:
            InvariantViolationError: On the first violation found
        """
        self._check_cycle_sides()
        triangles = sorted(self._labels) if scope is None else sorted(
            t for t in set(scope) if t in self._labels
        )
        for tri in triangles:
            label = self._labels[tri]
            if label not in SIGMA:
                raise InvariantViolationError(
                    "label_in_sigma", f"triangle {tri} has label {label.code}"
                )
            for k in SIDES:
                nb = self._adjacency[tri][k - 1]
                if nb is None:
                    continue
                if self._adjacency[nb][k - 1] != tri:
                    raise InvariantViolationError(
                        "gluing_involution",
                        f"triangle {tri} side {k} -> {nb} is not glued back",
                    )
                other = self._labels[nb]
                if label.spin(k) == other.spin(k):
                    raise InvariantViolationError(
                        "spin_complementarity",
                        f"triangles {tri} and {nb} carry the same spin on side {k}",
                    )
                if label == other:
                    raise InvariantViolationError(
                        "adjacent_labels_differ", f"triangles {tri} and {nb} share a label"
                    )

        for v in sorted(self._curved):
            n = self._incidence[v]
            if n < 1:
                raise InvariantViolationError("incidence_positive", f"vertex {v} has incidence {n}")
        total = self.global_deficit_units()
        if total != 0:
            raise InvariantViolationError(
                "gauss_bonnet",
                f"global deficit is {total} * pi/3",
                details={"deficit_units": total},
            )

    def _check_cycle_sides(self) -> None:
        """Every triple glued pairwise must use three different side indices."""
        for tri in sorted(self._moved):
            adjacency = self._adjacency[tri]
            for a, b in ((1, 2), (1, 3), (2, 3)):
                x, y = adjacency[a - 1], adjacency[b - 1]
                if x is None or y is None or x == y or x not in self._adjacency:
                    continue
                for c in SIDES:
                    if self._adjacency[x][c - 1] == y and c in (a, b):
                        raise InvariantViolationError(
                            "cycle_sides_once",
                            f"triangles {[tri, x, y]} are glued pairwise but reuse side {c}",
                            details={"triangles": [tri, x, y], "side": c},
                        )

    def signature(self) -> tuple[Any, ...]:
        """
        Id-free description of the surface.

        Triangles are identified by their corner vertices, so two surfaces with
        the same signature are identical up to triangle renaming.
        """
        triangles = frozenset(
            (
                self._corners[tri],
                self._labels[tri].code,
                tuple(
                    None if nb is None else self._corners[nb]
                    for nb in self._adjacency[tri]
                ),
            )
            for tri in self._labels
        )
        vertices = frozenset(
            (v, self._coords[v], self._incidence[v], v in self._well_vertices)
            for v in self._coords
        )
        return (triangles, vertices, self._corners[self.origin])

    def snapshot(self) -> dict[str, Any]:
        """Graph export: triangles, vertices and origin, in stable order."""
        return {
            "origin": self.origin,
            "triangles": [
                {
                    "id": tri,
                    "label": self._labels[tri].code,
                    "neighbors": [
                        {"side": k, "id": self._adjacency[tri][k - 1]} for k in SIDES
                    ],
                    "corners": list(self._corners[tri]),
                }
                for tri in sorted(self._labels)
            ],
            "vertices": [
                {
                    "id": v,
                    "x": self._coords[v][0],
                    "y": self._coords[v][1],
                    "incidence": self._incidence[v],
                    "is_well": v in self._well_vertices,
                }
                for v in sorted(self._coords)
            ],
        }
