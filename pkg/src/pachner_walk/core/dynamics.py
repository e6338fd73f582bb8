"""
Coupled walker and geometry dynamics.

One step is: rotation, coin, 3-to-1 moves on wells whose internal probability
fell below beta (each preceded by the outward translation of the well's
internal values), then 1-to-3 moves on triangles whose probability exceeds
alpha. Everything is deterministic; ties are broken by triangle id.
"""

from __future__ import annotations

from collections.abc import Callable
from enum import Enum

import numpy as np
import structlog

from pachner_walk.core.exceptions import (
    InvariantViolationError,
    NotACycleError,
    RayRevisitError,
    ValidationError,
)
from pachner_walk.core.grid import Triangulation
from pachner_walk.core.models import (
    SIDES,
    Cycle,
    MoveKind,
    MoveRecord,
    SideIndex,
    Slot,
    Thresholds,
    TriangleId,
    other_sides,
)
from pachner_walk.core.rays import RayExtents
from pachner_walk.core.walker import (
    NORM_TOLERANCE,
    CoinSet,
    Field,
    coin_substep,
    describe,
    init_origin_state,
    rotate_substep,
    total_norm,
    triangle_prob_array,
)

logger = structlog.get_logger(__name__)

MoveLog = list[MoveRecord]


class AssertLevel(str, Enum):
    """How much checking step() does after each step."""

    NONE = "none"
    NORM = "norm"
    FULL = "full"


class SimState:
    """
    Triangulation, field, coins and thresholds evolving together.

    Example:
        >>> state = SimState.initial(Thresholds(alpha=0.4, beta=0.2))
        >>> state.step()
        >>> [m.kind.value for m in state.move_log]
        ['split']
    """

    def __init__(
        self,
        grid: Triangulation,
        field: Field,
        coins: CoinSet,
        thresholds: Thresholds,
        assert_level: AssertLevel | str = AssertLevel.NORM,
    ) -> None:
        self.grid = grid
        self.field = field
        self.coins = coins
        self.thresholds = thresholds
        self.assert_level = AssertLevel(assert_level)
        self.step_index = 0
        self.move_log: MoveLog = []
        self._step_start_size = grid.size

    @classmethod
    def initial(
        cls,
        thresholds: Thresholds,
        coins: CoinSet | None = None,
        initial_radius: float = 3.0,
        assert_level: AssertLevel | str = AssertLevel.NORM,
    ) -> SimState:
        """Flat grid with the standard origin state."""
        grid = Triangulation.new_flat(initial_radius)
        return cls(grid, init_origin_state(grid), coins or CoinSet.default(), thresholds, assert_level)

    # ------------------------------------------------------------------
    # Detection
    # ------------------------------------------------------------------

    def detect_1to3(self) -> list[TriangleId]:
        """Triangles with probability above alpha, by descending probability then id."""
        return [tri for tri, _ in self._split_candidates()]

    def _split_candidates(self) -> list[tuple[TriangleId, float]]:
        probs = triangle_prob_array(self.field, self.grid, self.coins)
        hits = np.flatnonzero(probs > self.thresholds.alpha)
        hits = hits[np.lexsort((hits, -probs[hits]))]
        return [(TriangleId(int(tri)), float(probs[tri])) for tri in hits]

    def internal_probability(self, cycle: Cycle) -> float:
        """Probability on the three internal edges of a well (both slots of each)."""
        members = set(cycle)
        total = 0.0
        for member in cycle:
            for k in SIDES:
                if self.grid.glued(member, k) in members:
                    total += abs(self.field[(member, k)]) ** 2
        return total

    def detect_3to1(self) -> list[Cycle]:
        """Wells below beta, by descending internal probability then smallest member id."""
        beta = self.thresholds.beta
        if beta <= 0.0:
            return []
        hits = []
        for cycle in self.grid.find_3cycles():
            p = self.internal_probability(cycle)
            if p < beta:
                hits.append((p, min(cycle), cycle))
        hits.sort(key=lambda item: (-item[0], item[1]))
        return [cycle for _, _, cycle in hits]

    # ------------------------------------------------------------------
    # Moves
    # ------------------------------------------------------------------

    def translate_out(self, cycle: Cycle) -> None:
        """
        Move the six internal values of a well outward along their rays.

        Rays run member by member in canonical order, internal sides ascending.
        The ray of member x with external side j and internal side k visits
        p0 = x, p(n+1) = neighbor(neighbor(p(n), j), k) and shifts every side-k
        value one position outward. A ray stops once it carries zero and stands
        on a flat cell past the last nonzero slot and the last retired cell of
        its lattice line.

        Raises:
            NotACycleError: If cycle is not a live 3-cycle
            RayRevisitError: If a ray visits a triangle twice or re-enters the well
        """
        self._translate(cycle, RayExtents(self.grid, self.field))

    def _translate(self, cycle: Cycle, extents: RayExtents) -> None:
        grid = self.grid
        if not grid.is_3cycle(cycle):
            raise NotACycleError(tuple(cycle))
        canonical = grid.canonical_cycle(cycle)
        members = set(canonical)
        for member in canonical:
            j = grid.external_side(member, canonical)
            for k in other_sides(j):
                self._shift_ray(member, j, k, members, extents)

        leftovers = [
            (m, k)
            for m in canonical
            for k in SIDES
            if grid.glued(m, k) in members and (m, k) in self.field
        ]
        if leftovers:
            raise InvariantViolationError(
                "internal_slots_cleared",
                f"internal slots {leftovers} still hold amplitude after translation",
            )

    def _shift_ray(
        self,
        start: TriangleId,
        j: SideIndex,
        k: SideIndex,
        members: set[TriangleId],
        extents: RayExtents,
    ) -> None:
        grid = self.grid
        field = self.field
        trace: list[int] = [start]
        visited: set[TriangleId] = {start}

        carry = field.pop((start, k))
        current = start
        while not (carry == 0 and extents.ray_can_stop(current, j, k)):
            for side in (j, k):
                current = grid.neighbor(current, side)
                trace.append(current)
                if current in visited or current in members:
                    raise RayRevisitError(current, trace)
                visited.add(current)
            slot: Slot = (current, k)
            if carry != 0:
                extents.note(current, k)
            carry, field[slot] = field.pop(slot), carry

    def apply_merges(self) -> list[MoveRecord]:
        """Translate out and merge every well below beta, re-checking each before it merges."""
        records = []
        extents: RayExtents | None = None
        for cycle in self.detect_3to1():
            if not self.grid.is_3cycle(cycle):
                continue
            probability = self.internal_probability(cycle)
            if probability >= self.thresholds.beta:
                continue
            if extents is None:
                extents = RayExtents(self.grid, self.field)
            canonical = self.grid.canonical_cycle(cycle)
            self._translate(canonical, extents)
            external = {}
            for member in canonical:
                j = self.grid.external_side(member, canonical)
                external[j] = self.field.pop((member, j))
            merged = self.grid.merge_3to1(canonical)
            for j, value in external.items():
                self.field[(merged, j)] = value
                if value != 0:
                    extents.note(merged, j)
            records.append(self._log(MoveKind.MERGE, [*canonical, merged], probability))
        return records

    def apply_splits(self) -> list[MoveRecord]:
        """Split every triangle above alpha; outer values follow their side, new edges start at zero."""
        records = []
        for tri, probability in self._split_candidates():
            values = [self.field.pop((tri, j)) for j in SIDES]
            children = self.grid.split_1to3(tri)
            for j, child, value in zip(SIDES, children, values, strict=True):
                self.field[(child, j)] = value
            records.append(self._log(MoveKind.SPLIT, [tri, *children], probability))
        return records

    def _log(self, kind: MoveKind, ids: list[TriangleId], probability: float) -> MoveRecord:
        record = MoveRecord(
            step=self.step_index + 1,
            kind=kind,
            triangle_ids=[int(t) for t in ids],
            probability=probability,
        )
        self.move_log.append(record)
        logger.debug(
            "Pachner move",
            step=record.step,
            kind=kind.value,
            triangle_ids=record.triangle_ids,
            probability=probability,
        )
        return record

    # ------------------------------------------------------------------
    # Time evolution
    # ------------------------------------------------------------------

    def step(self) -> None:
        """Rotation, coin, 3-to-1 moves, 1-to-3 moves; then the configured checks."""
        self._step_start_size = self.grid.size
        self.field = rotate_substep(self.field, self.grid)
        self.field = coin_substep(self.field, self.grid, self.coins)
        self.apply_merges()
        self.apply_splits()
        self.step_index += 1
        logger.debug("Step finished", step=self.step_index, **describe(self.field))
        self._check()

    def run(self, steps: int, on_step: Callable[[SimState], None] | None = None) -> None:
        """Advance steps times, calling on_step after each step."""
        if steps < 0:
            raise ValidationError("steps", "must be non-negative")
        for _ in range(steps):
            self.step()
            if on_step is not None:
                on_step(self)

    def _check(self) -> None:
        if self.assert_level is AssertLevel.NONE:
            return
        norm = total_norm(self.field)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            logger.error("Norm drift", step=self.step_index, norm=norm)
            raise InvariantViolationError(
                "norm_conservation",
                f"norm is {norm:.15g} after step {self.step_index}",
                details={"step": self.step_index, "norm": norm},
            )
        if self.assert_level is AssertLevel.FULL:
            try:
                self.grid.check_invariants(self._changed_this_step())
            except InvariantViolationError as exc:
                logger.error("Invariant violated", step=self.step_index, **exc.details)
                raise

    def _changed_this_step(self) -> set[TriangleId]:
        """Triangles created during the last step and everything glued to them."""
        # Labels and corners never change in place; every edit makes new ids.
        grid = self.grid
        start = self._step_start_size
        fresh = [TriangleId(start + int(t)) for t in np.flatnonzero(grid.live_array()[start:])]
        scope = set(fresh)
        for tri in fresh:
            scope.update(nb for k in SIDES if (nb := grid.glued(tri, k)) is not None)
        return scope
