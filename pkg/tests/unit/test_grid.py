"""
Unit tests for the labeled triangulation.
"""

import math
import random

import numpy as np
import pytest

from pachner_walk.core.exceptions import (
    InvariantViolationError,
    NotACycleError,
    TriangleNotFoundError,
    ValidationError,
    VertexNotFoundError,
)
from pachner_walk.core.grid import (
    FLAT_INCIDENCE,
    ORIENT_DOWN,
    ORIENT_NONE,
    ORIENT_UP,
    Triangulation,
)
from pachner_walk.core.models import DOWN_LABEL, SIDES, SIGMA, UP_LABEL, Orientation, TriLabel


def test_new_flat_labels_and_gluing(flat_grid):
    """Origin is up-labeled and every neighbor is down-labeled."""
    origin = flat_grid.origin
    assert flat_grid.label(origin) == UP_LABEL
    for k in SIDES:
        nb = flat_grid.neighbor(origin, k)
        assert flat_grid.label(nb) == DOWN_LABEL
        assert flat_grid.neighbor(nb, k) == origin
    assert flat_grid.cell_of(origin) == (0, 0, Orientation.UP)


def test_new_flat_is_flat(flat_grid):
    """A fresh grid has no curvature and no 3-cycles."""
    assert all(flat_grid.incidence(v) == FLAT_INCIDENCE for v in flat_grid.vertices())
    assert flat_grid.curved_vertices() == frozenset()
    assert flat_grid.global_deficit_units() == 0
    assert flat_grid.find_3cycles() == []
    flat_grid.check_invariants()


def test_new_flat_origin_centroid_at_zero(flat_grid):
    x, y = flat_grid.centroid(flat_grid.origin)
    assert x == pytest.approx(0.0, abs=1e-12)
    assert y == pytest.approx(0.0, abs=1e-12)


def test_new_flat_rejects_non_positive_radius():
    """initial_radius must be positive."""
    with pytest.raises(ValidationError):
        Triangulation.new_flat(0.0)


def test_ensure_materialized_extends_and_is_idempotent():
    """Missing neighbors are created once."""
    grid = Triangulation.new_flat(0.1)
    assert grid.triangle_count == 1
    grid.ensure_materialized(grid.origin)
    assert grid.triangle_count == 4
    grid.ensure_materialized(grid.origin)
    assert grid.triangle_count == 4
    for k in SIDES:
        assert grid.glued(grid.origin, k) is not None


def test_completed_hexagon_vertex_stays_flat():
    """Six triangles close around a lattice vertex."""
    grid = Triangulation.new_flat(0.1)
    tri = grid.origin
    # Walk around corner 1 of the origin until the hexagon closes.
    ring = [tri]
    for k in (3, 1, 2, 3, 1):
        tri = grid.neighbor(tri, k)
        ring.append(tri)
    assert grid.neighbor(tri, 2) == grid.origin
    corner = grid.corners(grid.origin)[0]
    assert all(corner in grid.corners(t) for t in ring)
    assert grid.incidence(corner) == 6
    assert grid.vertex_deficit(corner) == 0.0


def test_dead_ids_raise(flat_grid):
    """Unknown ids raise not-found errors."""
    with pytest.raises(TriangleNotFoundError):
        flat_grid.label(10_000)
    with pytest.raises(TriangleNotFoundError):
        flat_grid.ensure_materialized(10_000)
    with pytest.raises(VertexNotFoundError):
        flat_grid.vertex_deficit(10_000)


@pytest.mark.parametrize(
    "parent, expected",
    [
        ("uuu", ("uuu", "uud", "ddu")),
        ("uud", ("uud", "uuu", "ddd")),
        ("ddd", ("ddd", "ddu", "uud")),
        ("ddu", ("ddu", "ddd", "uuu")),
    ],
)
def test_split_labels(parent, expected):
    """Children labels follow the parent label."""
    label = TriLabel.from_code(parent)
    assert (label.code, label.flipped(3).code, label.flipped(1, 2).code) == expected
    assert all(TriLabel.from_code(code) in SIGMA for code in expected)


def test_split_origin_topology(flat_grid):
    """Each child keeps one parent side; internal gluings are fixed."""
    origin = flat_grid.origin
    outer = [flat_grid.neighbor(origin, k) for k in SIDES]
    n1, n2, n3 = flat_grid.split_1to3(origin)

    assert flat_grid.origin == n1
    assert not flat_grid.is_live(origin)
    assert [flat_grid.label(t).code for t in (n1, n2, n3)] == ["uuu", "uud", "ddu"]
    for k, child in zip(SIDES, (n1, n2, n3)):
        assert flat_grid.neighbor(child, k) == outer[k - 1]
        assert flat_grid.neighbor(outer[k - 1], k) == child
    assert flat_grid.neighbor(n2, 1) == n3
    assert flat_grid.neighbor(n3, 2) == n1
    assert flat_grid.neighbor(n1, 3) == n2
    flat_grid.check_invariants()


def test_split_curvature_bookkeeping(flat_grid):
    """A split adds a pi well and three -pi/3 corners."""
    parent_corners = flat_grid.corners(flat_grid.origin)
    flat_grid.split_1to3(flat_grid.origin)
    (center,) = flat_grid.well_vertices

    assert flat_grid.incidence(center) == 3
    assert flat_grid.vertex_deficit(center) == pytest.approx(math.pi)
    for v in parent_corners:
        assert flat_grid.incidence(v) == 7
        assert flat_grid.vertex_deficit(v) == pytest.approx(-math.pi / 3)
    assert flat_grid.global_deficit_units() == 0
    assert math.hypot(*flat_grid.coords(center)) == pytest.approx(0.0, abs=1e-12)


def test_internal_edge_midpoint(flat_grid):
    corners = flat_grid.corners(flat_grid.origin)
    n1, n2, _ = flat_grid.split_1to3(flat_grid.origin)
    (center,) = flat_grid.well_vertices
    # N1-N2 share side 3, which joins the center and the parent's corner 3.
    cx, cy = flat_grid.coords(center)
    px, py = flat_grid.coords(corners[2])
    assert flat_grid.slot_position((n1, 3)) == pytest.approx(((cx + px) / 2, (cy + py) / 2))
    assert flat_grid.slot_position((n1, 3)) == flat_grid.slot_position((n2, 3))


def test_slot_position_shared_by_both_slots(flat_grid):
    for tri in list(flat_grid.triangles()):
        for k in SIDES:
            nb = flat_grid.glued(tri, k)
            if nb is not None:
                assert flat_grid.slot_position((tri, k)) == pytest.approx(
                    flat_grid.slot_position((nb, k))
                )


def test_find_3cycles_after_split(flat_grid):
    """One split creates one canonical 3-cycle."""
    n1, n2, n3 = flat_grid.split_1to3(flat_grid.origin)
    assert flat_grid.find_3cycles() == [(n2, n3, n1)]
    assert flat_grid.canonical_cycle((n1, n2, n3)) == (n2, n3, n1)
    assert flat_grid.external_side(n1, (n2, n3, n1)) == 1


def test_find_3cycles_disjoint_splits():
    grid = Triangulation.new_flat(4.0)
    first = grid.split_1to3(grid.origin)
    far = grid.walk_path([1, 2, 1, 2, 1, 2])
    second = grid.split_1to3(far)
    cycles = grid.find_3cycles()
    assert len(cycles) == 2
    assert {frozenset(c) for c in cycles} == {frozenset(first), frozenset(second)}


def test_merge_restores_pre_split_surface(flat_grid):
    """A merge exactly undoes the split."""
    flat_grid.ensure_materialized(flat_grid.origin)
    before = flat_grid.signature()
    children = flat_grid.split_1to3(flat_grid.origin)
    merged = flat_grid.merge_3to1(flat_grid.canonical_cycle(children))

    assert flat_grid.label(merged) == UP_LABEL
    assert flat_grid.origin == merged
    assert flat_grid.cell_of(merged) == (0, 0, Orientation.UP)
    assert flat_grid.well_vertices == frozenset()
    assert flat_grid.curved_vertices() == frozenset()
    assert flat_grid.signature() == before
    flat_grid.check_invariants()


def test_merge_takes_sides_from_external_members(flat_grid):
    origin = flat_grid.origin
    outer = [flat_grid.neighbor(origin, k) for k in SIDES]
    u, v, w = flat_grid.canonical_cycle(flat_grid.split_1to3(origin))
    # u, v, w carry external sides 2, 3, 1.
    assert flat_grid.neighbor(u, 2) == outer[1]
    assert flat_grid.neighbor(v, 3) == outer[2]
    assert flat_grid.neighbor(w, 1) == outer[0]
    merged = flat_grid.merge_3to1((u, v, w))
    assert [flat_grid.neighbor(merged, k) for k in SIDES] == outer


def test_merge_rejects_non_cycle(flat_grid):
    """Merging a non-cycle raises NotACycleError."""
    origin = flat_grid.origin
    triple = (origin, flat_grid.neighbor(origin, 1), flat_grid.neighbor(origin, 2))
    with pytest.raises(NotACycleError):
        flat_grid.merge_3to1(triple)


def test_nested_split_and_merge_round_trip(flat_grid):
    n1, _, _ = flat_grid.split_1to3(flat_grid.origin)
    before = flat_grid.signature()
    inner = flat_grid.split_1to3(n1)
    # The outer well center now has incidence 4, so only the inner cycle remains.
    assert flat_grid.find_3cycles() == [flat_grid.canonical_cycle(inner)]
    assert flat_grid.global_deficit_units() == 0
    flat_grid.merge_3to1(flat_grid.canonical_cycle(inner))
    assert flat_grid.signature() == before
    flat_grid.check_invariants()


def test_randomized_split_merge_round_trips():
    """Random split/merge pairs leave the surface unchanged."""
    rng = random.Random(1234)
    grid = Triangulation.new_flat(3.0)
    for trial in range(300):
        live = list(grid.triangles())
        tri = rng.choice(live)
        grid.ensure_materialized(tri)
        before = grid.signature()
        children = grid.split_1to3(tri)
        grid.merge_3to1(grid.canonical_cycle(children))
        assert grid.signature() == before
        # Occasionally keep a split so later pairs act on curved surfaces.
        if trial % 50 == 0:
            grid.split_1to3(rng.choice(list(grid.triangles())))
    grid.check_invariants()


def test_snapshot_records(flat_grid):
    """Graph export lists triangles and vertices in id order."""
    n1, _, _ = flat_grid.split_1to3(flat_grid.origin)
    snap = flat_grid.snapshot()
    assert snap["origin"] == n1
    ids = [t["id"] for t in snap["triangles"]]
    assert ids == sorted(ids)
    first = snap["triangles"][0]
    assert set(first) == {"id", "label", "neighbors", "corners"}
    assert [n["side"] for n in first["neighbors"]] == [1, 2, 3]
    wells = [v for v in snap["vertices"] if v["is_well"]]
    assert len(wells) == 1 and wells[0]["incidence"] == 3


def test_walk_path_follows_sides(flat_grid):
    origin = flat_grid.origin
    assert flat_grid.walk_path([]) == origin
    assert flat_grid.walk_path([1, 1]) == origin
    assert flat_grid.walk_path([2]) == flat_grid.neighbor(origin, 2)
    with pytest.raises(ValidationError):
        flat_grid.walk_path([4])


def test_ids_never_reused(flat_grid):
    seen = set(flat_grid.triangles())
    children = flat_grid.split_1to3(flat_grid.origin)
    assert not seen & set(children)
    merged = flat_grid.merge_3to1(flat_grid.canonical_cycle(children))
    assert merged not in seen | set(children)


def test_arrays_mirror_gluing_and_labels(flat_grid):
    """The numpy rows agree with the dictionary view after moves."""
    parent = flat_grid.origin
    n1, _, _ = flat_grid.split_1to3(parent)
    flat_grid.split_1to3(flat_grid.neighbor(n1, 1))
    nbr = flat_grid.neighbor_array()
    up = flat_grid.up_array()
    live = flat_grid.live_array()
    mid = flat_grid.midpoint_array()
    assert nbr.shape == (flat_grid.size, 3)
    assert set(np.flatnonzero(live)) == set(flat_grid.triangles())
    for tri in flat_grid.triangles():
        for k in SIDES:
            glued = flat_grid.glued(tri, k)
            assert nbr[tri, k - 1] == (-1 if glued is None else glued)
            assert up[tri, k - 1] == (flat_grid.label(tri).spin(k).value == "up")
            assert tuple(mid[tri, k - 1]) == flat_grid.slot_position((tri, k))
    assert not live[parent]
    assert (nbr[parent] == -1).all()


def test_cell_arrays_track_retired_and_restored_cells(flat_grid):
    origin = flat_grid.origin
    ij, orient = flat_grid.cell_arrays()
    assert tuple(ij[origin]) == (0, 0)
    assert orient[origin] == ORIENT_UP
    assert orient[flat_grid.neighbor(origin, 1)] == ORIENT_DOWN

    children = flat_grid.split_1to3(origin)
    _, orient = flat_grid.cell_arrays()
    assert orient[origin] == ORIENT_NONE
    assert all(orient[c] == ORIENT_NONE for c in children)
    assert flat_grid.retired_cells() == {(0, 0, Orientation.UP)}

    merged = flat_grid.merge_3to1(flat_grid.canonical_cycle(children))
    ij, orient = flat_grid.cell_arrays()
    assert orient[merged] == ORIENT_UP
    assert tuple(ij[merged]) == (0, 0)
    assert flat_grid.retired_cells() == frozenset()


def test_cycle_side_reuse_detected(flat_grid):
    """A triple glued pairwise must not reuse a side index."""
    n1, n2, n3 = flat_grid.split_1to3(flat_grid.origin)
    flat_grid.check_invariants()
    assert flat_grid.glued(n3, 2) == n1
    # n3 is glued to n1 on side 2; point that side at n2 instead.
    flat_grid._adjacency[n3][1] = n2

    with pytest.raises(InvariantViolationError) as exc_info:
        flat_grid.check_invariants()
    assert exc_info.value.details["invariant"] == "cycle_sides_once"
    assert exc_info.value.details["side"] == 2
