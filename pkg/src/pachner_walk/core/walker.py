"""
Quantum field over edge-component slots.

The walker stores the gauged field, one complex amplitude per (triangle, side)
slot with finite support. A step of the walk on a fixed surface is a rotation
of each triangle's three carried values followed by the coin W on every edge.
Thresholds and observables read the physical field, obtained per edge as
U_k^dagger applied to the stored spinor.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from typing import Any

import numpy as np
import structlog

from pachner_walk.core.exceptions import (
    InvariantViolationError,
    NonUnitaryCoinError,
    ValidationError,
)
from pachner_walk.core.grid import Triangulation
from pachner_walk.core.models import SIDES, SideIndex, Slot, Spin, TriangleId

logger = structlog.get_logger(__name__)

UNITARITY_TOLERANCE = 1e-12
PRUNE_THRESHOLD = 1e-15
NORM_TOLERANCE = 1e-10

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
IDENTITY = np.eye(2, dtype=complex)

COIN_NAMES = ("W", "U1", "U2", "U3")


def _check_unitary(name: str, matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2, 2):
        raise ValidationError(name, f"expected a 2x2 matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError(name, "matrix entries must be finite")
    deviation = float(np.max(np.abs(matrix @ matrix.conj().T - IDENTITY)))
    if deviation > UNITARITY_TOLERANCE:
        raise NonUnitaryCoinError(name, deviation)
    return matrix


def matrix_from_reals(name: str, reals: Sequence[float]) -> np.ndarray:
    """
    Build a 2x2 complex matrix from 8 reals.

    The reals are row-major (re, im) pairs: m00, m01, m10, m11.
    """
    if len(reals) != 8:
        raise ValidationError(name, f"expected 8 reals, got {len(reals)}")
    values = np.asarray(reals, dtype=float)
    return (values[0::2] + 1j * values[1::2]).reshape(2, 2)


def matrix_to_reals(matrix: np.ndarray) -> list[float]:
    flat = np.asarray(matrix, dtype=complex).reshape(-1)
    return [float(x) for z in flat for x in (z.real, z.imag)]


class CoinSet:
    """
    Edge coin W and per-side gauge unitaries U1, U2, U3.

    All four matrices are checked for unitarity on construction.

    Example:
        >>> coins = CoinSet.default()
        >>> coins.gauge_is_identity
        True
    """

    def __init__(
        self,
        w: np.ndarray = HADAMARD,
        u1: np.ndarray = IDENTITY,
        u2: np.ndarray = IDENTITY,
        u3: np.ndarray = IDENTITY,
    ) -> None:
        self.w = _check_unitary("W", w)
        self.gauges = {
            1: _check_unitary("U1", u1),
            2: _check_unitary("U2", u2),
            3: _check_unitary("U3", u3),
        }
        self.w_entries = tuple(complex(z) for z in self.w.reshape(-1))
        self._gauge_dagger = {
            k: tuple(complex(z) for z in u.conj().T.reshape(-1)) for k, u in self.gauges.items()
        }
        self.gauge_is_identity = all(np.array_equal(u, IDENTITY) for u in self.gauges.values())

    @classmethod
    def default(cls) -> CoinSet:
        """Hadamard coin with identity gauges."""
        return cls()

    @classmethod
    def from_reals(cls, coins: Mapping[str, Sequence[float] | None]) -> CoinSet:
        """
        Build a coin set from 8-real encodings keyed by W, U1, U2, U3.

        Missing or None entries keep their defaults.

        Raises:
            ValidationError: If an encoding does not have 8 reals
            NonUnitaryCoinError: If a matrix fails the unitarity check
        """
        unknown = set(coins) - set(COIN_NAMES)
        if unknown:
            raise ValidationError("coins", f"unknown coin names {sorted(unknown)}")
        defaults = {"W": HADAMARD, "U1": IDENTITY, "U2": IDENTITY, "U3": IDENTITY}
        matrices = {
            name: defaults[name] if coins.get(name) is None else matrix_from_reals(name, coins[name])  # type: ignore[arg-type]
            for name in COIN_NAMES
        }
        return cls(matrices["W"], matrices["U1"], matrices["U2"], matrices["U3"])

    def to_reals(self) -> dict[str, list[float]]:
        return {
            "W": matrix_to_reals(self.w),
            "U1": matrix_to_reals(self.gauges[1]),
            "U2": matrix_to_reals(self.gauges[2]),
            "U3": matrix_to_reals(self.gauges[3]),
        }

    def ungauge(self, k: SideIndex, up: complex, down: complex) -> tuple[complex, complex]:
        """Physical spinor U_k^dagger (up, down) of an edge on side k."""
        a, b, c, d = self._gauge_dagger[k]
        return a * up + b * down, c * up + d * down

    def gauge_dagger_entries(self, k: SideIndex) -> tuple[complex, complex, complex, complex]:
        """Row-major entries of U_k^dagger."""
        return self._gauge_dagger[k]  # type: ignore[return-value]


class Field:
    """
    Finite-support map from slots to complex amplitudes.

    Backed by a (rows, 3) complex array indexed by triangle id and side - 1.
    Zero entries are absent slots; setting a slot to 0 removes it. Iteration
    and slots() follow (triangle, side) order.
    """

    def __init__(self, amplitudes: Mapping[Slot, complex] | None = None) -> None:
        self._amps = np.zeros((0, 3), dtype=complex)
        if amplitudes:
            for slot, value in amplitudes.items():
                self[slot] = value

    @classmethod
    def from_array(cls, amplitudes: np.ndarray) -> Field:
        """Wrap a (rows, 3) complex array without copying."""
        field = cls()
        field._amps = np.asarray(amplitudes, dtype=complex)
        return field

    @property
    def rows(self) -> int:
        """Number of triangle rows currently allocated."""
        return len(self._amps)

    def array(self, rows: int) -> np.ndarray:
        """Amplitudes of triangles 0 .. rows - 1, zero-padded when the field is shorter."""
        if len(self._amps) >= rows:
            return self._amps[:rows]
        padded = np.zeros((rows, 3), dtype=complex)
        padded[: len(self._amps)] = self._amps
        return padded

    def _index(self, slot: Slot) -> tuple[int, int] | None:
        tri, k = slot
        if 0 <= tri < len(self._amps) and k in SIDES:
            return tri, k - 1
        return None

    def __getitem__(self, slot: Slot) -> complex:
        index = self._index(slot)
        return 0j if index is None else complex(self._amps[index])

    def __setitem__(self, slot: Slot, value: complex) -> None:
        value = complex(value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise InvariantViolationError(
                "finite_amplitude", f"slot {slot} received a non-finite amplitude"
            )
        tri, k = slot
        if k not in SIDES or tri < 0:
            raise ValidationError("slot", f"invalid slot {slot}")
        if tri >= len(self._amps):
            if value == 0:
                return
            self._amps = self.array(max(2 * len(self._amps), tri + 1))
        self._amps[tri, k - 1] = value

    def __contains__(self, slot: object) -> bool:
        if not isinstance(slot, tuple) or len(slot) != 2:
            return False
        return self[slot] != 0  # type: ignore[index]

    def __len__(self) -> int:
        return int(np.count_nonzero(self._amps))

    def __iter__(self) -> Iterator[Slot]:
        return iter(self.slots())

    def pop(self, slot: Slot) -> complex:
        value = self[slot]
        if value != 0:
            self._amps[slot[0], slot[1] - 1] = 0
        return value

    def items(self) -> list[tuple[Slot, complex]]:
        rows, cols = np.nonzero(self._amps)
        return [
            ((TriangleId(int(t)), int(c) + 1), complex(self._amps[t, c]))
            for t, c in zip(rows, cols, strict=True)
        ]

    def slots(self) -> list[Slot]:
        """Support slots in (triangle, side) order."""
        rows, cols = np.nonzero(self._amps)
        return [(TriangleId(int(t)), int(c) + 1) for t, c in zip(rows, cols, strict=True)]

    def triangles(self) -> set[TriangleId]:
        return {TriangleId(int(t)) for t in np.flatnonzero(self._amps.any(axis=1))}

    def copy(self) -> Field:
        return Field.from_array(self._amps.copy())

    def prune(self, threshold: float = PRUNE_THRESHOLD) -> None:
        """Drop amplitudes whose modulus is below threshold."""
        self._amps[np.abs(self._amps) < threshold] = 0

    def as_dict(self) -> dict[Slot, complex]:
        return dict(self.items())


# ----------------------------------------------------------------------
# Initial states
# ----------------------------------------------------------------------


def init_origin_state(grid: Triangulation) -> Field:
    """1/sqrt(3) on each of the three slots of the origin triangle."""
    amplitude = 1.0 / math.sqrt(3.0)
    return Field({(grid.origin, k): amplitude for k in SIDES})


def init_from_slots(
    grid: Triangulation,
    entries: Iterable[tuple[Sequence[int], SideIndex, complex]],
) -> Field:
    """
    Build a field from (path from origin, side, amplitude) entries.

    Amplitudes are taken as stored (gauged) values; repeated slots add up.

    Raises:
        ValidationError: If the resulting field is not normalized
    """
    field = Field()
    for path, side, amplitude in entries:
        if side not in SIDES:
            raise ValidationError("initial_state.side", f"side must be 1, 2 or 3, got {side}")
        tri = grid.walk_path(path)
        field[(tri, side)] = field[(tri, side)] + complex(amplitude)
    norm = total_norm(field)
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise ValidationError("initial_state", f"initial field has norm {norm:.12g}, expected 1")
    return field


# ----------------------------------------------------------------------
# Substeps
# ----------------------------------------------------------------------


def rotate_substep(field: Field, grid: Triangulation) -> Field:
    """New value at (v, k) is the old value at (v, k - 1), for every triangle in the support."""
    return Field.from_array(np.roll(field.array(grid.size), 1, axis=1))


def materialize_support(field: Field, grid: Triangulation) -> None:
    """Materialize the partner of every nonzero slot whose side is still open."""
    amps = field.array(grid.size)
    rows = np.flatnonzero(((amps != 0) & (grid.neighbor_array() < 0)).any(axis=1))
    for tri in rows:
        grid.ensure_materialized(TriangleId(int(tri)))


def check_complementarity(grid: Triangulation) -> None:
    """
    Every glued edge must pair an up slot with a down slot.

    Raises:
        InvariantViolationError: On the first edge with equal spins
    """
    nbr = grid.neighbor_array()
    up = grid.up_array()
    rows, cols = np.nonzero(nbr >= 0)
    bad = np.flatnonzero(up[rows, cols] == up[nbr[rows, cols], cols])
    if len(bad):
        tri, col = int(rows[bad[0]]), int(cols[bad[0]])
        slot, partner = (tri, col + 1), (int(nbr[tri, col]), col + 1)
        spin = Spin.UP if up[tri, col] else Spin.DOWN
        raise InvariantViolationError(
            "spin_complementarity",
            f"edge {slot} <-> {partner} carries {spin.value} on both slots",
            details={"slot": list(slot), "partner": list(partner)},
        )


def _edge_pairs(grid: Triangulation, col: int) -> tuple[np.ndarray, np.ndarray]:
    """(up rows, down rows) of every glued edge on side col + 1."""
    nbr = grid.neighbor_array()
    up_rows = np.flatnonzero(grid.up_array()[:, col] & (nbr[:, col] >= 0))
    return up_rows, nbr[up_rows, col]


def coin_substep(field: Field, grid: Triangulation, coins: CoinSet) -> Field:
    """Apply W to the spinor of every edge, then prune amplitudes below PRUNE_THRESHOLD."""
    materialize_support(field, grid)
    check_complementarity(grid)
    amps = field.array(grid.size)
    w00, w01, w10, w11 = coins.w_entries
    result = np.zeros_like(amps)
    for col in range(3):
        up_rows, down_rows = _edge_pairs(grid, col)
        up, down = amps[up_rows, col], amps[down_rows, col]
        result[up_rows, col] = w00 * up + w01 * down
        result[down_rows, col] = w10 * up + w11 * down
    coined = Field.from_array(result)
    coined.prune()
    return coined


# ----------------------------------------------------------------------
# Gauge and probabilities
# ----------------------------------------------------------------------


def physical_array(field: Field, grid: Triangulation, coins: CoinSet) -> np.ndarray:
    """
    (size, 3) physical amplitudes: per edge on side k, psi = U_k^dagger psi_tilde.

    An open slot pairs with an unmaterialized partner, which holds zero.
    """
    amps = field.array(grid.size)
    if coins.gauge_is_identity:
        return amps.copy()
    nbr = grid.neighbor_array()
    up_flags = grid.up_array()
    physical = np.zeros_like(amps)
    for col in range(3):
        a, b, c, d = coins.gauge_dagger_entries(col + 1)
        up_rows, down_rows = _edge_pairs(grid, col)
        up, down = amps[up_rows, col], amps[down_rows, col]
        physical[up_rows, col] = a * up + b * down
        physical[down_rows, col] = c * up + d * down
        open_rows = np.flatnonzero(nbr[:, col] < 0)
        values = amps[open_rows, col]
        physical[open_rows, col] = np.where(up_flags[open_rows, col], a * values, d * values)
    return physical


def gauge_to_physical(field: Field, grid: Triangulation, coins: CoinSet) -> Field:
    """The physical field, pruned below PRUNE_THRESHOLD."""
    physical = Field.from_array(physical_array(field, grid, coins))
    physical.prune()
    return physical


def total_norm(field: Field) -> float:
    """Sum of |amplitude|^2 over the support (gauge invariant)."""
    amps = field.array(field.rows)
    return float(np.sum(amps.real**2 + amps.imag**2))


def physical_prob_array(field: Field, grid: Triangulation, coins: CoinSet) -> np.ndarray:
    """(size, 3) array of |psi|^2 per slot in the physical gauge."""
    physical = physical_array(field, grid, coins)
    return physical.real**2 + physical.imag**2


def physical_slot_probs(field: Field, grid: Triangulation, coins: CoinSet) -> dict[Slot, float]:
    """|psi|^2 per slot in the physical gauge, nonzero slots only."""
    probs = physical_prob_array(field, grid, coins)
    rows, cols = np.nonzero(probs)
    return {
        (TriangleId(int(t)), int(c) + 1): float(probs[t, c])
        for t, c in zip(rows, cols, strict=True)
    }


def triangle_prob_array(field: Field, grid: Triangulation, coins: CoinSet) -> np.ndarray:
    """Physical probability per triangle id, zero for retired and empty rows."""
    return physical_prob_array(field, grid, coins).sum(axis=1)


def triangle_probs(field: Field, grid: Triangulation, coins: CoinSet) -> dict[TriangleId, float]:
    """Sum over k of |psi(tri, k)|^2 for every triangle with physical support."""
    probs = triangle_prob_array(field, grid, coins)
    return {TriangleId(int(t)): float(probs[t]) for t in np.flatnonzero(probs)}


def component_prob(
    field: Field, grid: Triangulation, tri: TriangleId, coins: CoinSet | None = None
) -> float:
    """Probability carried by one triangle, in the physical gauge."""
    if coins is None or coins.gauge_is_identity:
        return math.fsum(abs(field[(tri, k)]) ** 2 for k in SIDES)
    total = 0.0
    for k in SIDES:
        slot = (tri, k)
        nb = grid.glued(tri, k)
        partner_value = 0j if nb is None else field[(nb, k)]
        if grid.spin(slot) is Spin.UP:
            value, _ = coins.ungauge(k, field[slot], partner_value)
        else:
            _, value = coins.ungauge(k, partner_value, field[slot])
        total += abs(value) ** 2
    return total


def snapshot_records(
    field: Field, grid: Triangulation, coins: CoinSet
) -> list[tuple[int, int, float, float]]:
    """Physical field as (triangle id, side, re, im), sorted by (id, side)."""
    return [
        (tri, k, value.real, value.imag)
        for (tri, k), value in gauge_to_physical(field, grid, coins).items()
    ]


def describe(field: Field) -> dict[str, Any]:
    """Short summary used in log events."""
    return {"support": len(field), "norm": total_norm(field)}
