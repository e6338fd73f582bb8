"""
Reference walk on the static triangular lattice.

Cells are addressed by lattice coordinates (i, j, "up" | "down") and edges are
enumerated from the up cell that owns them, so nothing here goes through the
dual graph of the main engine. Up cells carry the up component of all three
of their edges, down cells the down component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from pachner_walk.core.walker import PRUNE_THRESHOLD, CoinSet

FlatCell = tuple[int, int, str]
FlatSlot = tuple[FlatCell, int]

UP = "up"
DOWN = "down"

# Offset of the down cell sharing side k with up cell (i, j).
_DOWN_PARTNER = {1: (0, 0), 2: (-1, 0), 3: (0, -1)}

# Lattice midpoint of side k of up cell (i, j), relative to (i, j).
_UP_EDGE_MIDPOINT = {1: (0.5, 0.5), 2: (0.0, 0.5), 3: (0.5, 0.0)}


@dataclass
class FlatState:
    """Amplitudes keyed by (cell, side), plus the coins driving them."""

    amplitudes: dict[FlatSlot, complex] = field(default_factory=dict)
    coins: CoinSet = field(default_factory=CoinSet.default)
    step_index: int = 0


def _owner_edge(slot: FlatSlot) -> tuple[int, int, int]:
    """(i, j, k) of the up cell owning the edge of a slot."""
    (i, j, orientation), k = slot
    if orientation == UP:
        return i, j, k
    di, dj = _DOWN_PARTNER[k]
    return i - di, j - dj, k


def _edge_slots(i: int, j: int, k: int) -> tuple[FlatSlot, FlatSlot]:
    di, dj = _DOWN_PARTNER[k]
    return ((i, j, UP), k), ((i + di, j + dj, DOWN), k)


def initial_flat_state(coins: CoinSet | None = None) -> FlatState:
    """1/sqrt(3) on the three sides of the up cell at the lattice origin."""
    amplitude = complex(1.0 / math.sqrt(3.0))
    return FlatState(
        amplitudes={((0, 0, UP), k): amplitude for k in (1, 2, 3)},
        coins=coins or CoinSet.default(),
    )


def flat_step(state: FlatState) -> FlatState:
    """One rotation and one coin application, returning a new state."""
    rotated = {(cell, k % 3 + 1): value for (cell, k), value in state.amplitudes.items()}

    edges = sorted({_owner_edge(slot) for slot in rotated})
    if not edges:
        return FlatState({}, state.coins, state.step_index + 1)
    pairs = [_edge_slots(*edge) for edge in edges]
    spinors = np.array(
        [[rotated.get(up, 0j) for up, _ in pairs], [rotated.get(down, 0j) for _, down in pairs]],
        dtype=complex,
    )
    mixed = state.coins.w @ spinors

    amplitudes: dict[FlatSlot, complex] = {}
    for n, (up, down) in enumerate(pairs):
        for slot, value in ((up, mixed[0, n]), (down, mixed[1, n])):
            if abs(value) >= PRUNE_THRESHOLD:
                amplitudes[slot] = complex(value)
    return FlatState(amplitudes, state.coins, state.step_index + 1)


def flat_run(state: FlatState, steps: int) -> FlatState:
    for _ in range(steps):
        state = flat_step(state)
    return state


def flat_norm(state: FlatState) -> float:
    return math.fsum(abs(a) ** 2 for a in state.amplitudes.values())


def flat_variance(state: FlatState) -> float:
    """Total variance of edge-midpoint positions, in squared edge lengths."""
    if not state.amplitudes:
        return 0.0
    points = []
    weights = []
    for slot, value in state.amplitudes.items():
        i, j, k = _owner_edge(slot)
        du, dv = _UP_EDGE_MIDPOINT[k]
        a, b = i + du, j + dv
        points.append((a + 0.5 * b, 0.5 * math.sqrt(3.0) * b))
        weights.append(abs(value) ** 2)
    xy = np.array(points)
    w = np.array(weights)
    mean = w @ xy / w.sum()
    return float(w @ np.sum((xy - mean) ** 2, axis=1) / w.sum())
