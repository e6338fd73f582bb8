"""
Data models for Pachner Walk.

This module defines the small value types shared by the grid, the walker and
the dynamics (spins, labels, side indices, lattice cells), plus the Pydantic
records produced by a run (moves, observables, fits).
"""

from enum import Enum
from typing import Any, NamedTuple, NewType

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic import ValidationError as PydanticValidationError

from pachner_walk.core.exceptions import ValidationError

TriangleId = NewType("TriangleId", int)
VertexId = NewType("VertexId", int)

# Side indices live in {1, 2, 3} with cyclic arithmetic.
SideIndex = int
SIDES: tuple[SideIndex, SideIndex, SideIndex] = (1, 2, 3)

Slot = tuple[TriangleId, SideIndex]
Cycle = tuple[TriangleId, TriangleId, TriangleId]


def side_add(k: SideIndex, n: int) -> SideIndex:
    """Return k + n in the cyclic side group {1, 2, 3}."""
    return (k - 1 + n) % 3 + 1


def other_sides(k: SideIndex) -> tuple[SideIndex, SideIndex]:
    """Return the two side indices different from k, ascending."""
    a, b = (s for s in SIDES if s != k)
    return a, b


def check_side(k: int) -> SideIndex:
    """Validate a side index."""
    if k not in SIDES:
        raise ValidationError("side", f"side index must be 1, 2 or 3, got {k}")
    return k


class Spin(str, Enum):
    """Spinor component carried by a slot."""

    UP = "up"
    DOWN = "down"

    def complement(self) -> "Spin":
        return Spin.DOWN if self is Spin.UP else Spin.UP

    @property
    def symbol(self) -> str:
        return "u" if self is Spin.UP else "d"


class TriLabel(NamedTuple):
    """
    Label of a triangle: the spin carried on each of its three sides.

    Only the four members of SIGMA are legal labels.
    """

    s1: Spin
    s2: Spin
    s3: Spin

    def spin(self, k: SideIndex) -> Spin:
        return self[k - 1]

    def flipped(self, *sides: SideIndex) -> "TriLabel":
        """Return a copy with the spins on the given sides complemented."""
        spins = list(self)
        for k in sides:
            spins[k - 1] = spins[k - 1].complement()
        return TriLabel(*spins)

    @property
    def code(self) -> str:
        """Compact form such as 'uud'."""
        return "".join(s.symbol for s in self)

    @classmethod
    def from_code(cls, code: str) -> "TriLabel":
        mapping = {"u": Spin.UP, "d": Spin.DOWN}
        return cls(*(mapping[c] for c in code))


UP_LABEL = TriLabel(Spin.UP, Spin.UP, Spin.UP)
DOWN_LABEL = TriLabel(Spin.DOWN, Spin.DOWN, Spin.DOWN)

SIGMA: frozenset[TriLabel] = frozenset(
    {
        UP_LABEL,
        DOWN_LABEL,
        TriLabel(Spin.UP, Spin.UP, Spin.DOWN),
        TriLabel(Spin.DOWN, Spin.DOWN, Spin.UP),
    }
)


class Orientation(str, Enum):
    """Orientation of a cell of the flat triangular lattice."""

    UP = "up"
    DOWN = "down"


class Cell(NamedTuple):
    """Lattice coordinates of a flat-grid triangle."""

    i: int
    j: int
    orientation: Orientation


class Regime(str, Enum):
    """Stability regime implied by the threshold pair."""

    UNSTABLE = "unstable"
    INTERMEDIATE = "intermediate"
    QUASI_STABLE = "quasi-stable"


class Thresholds(BaseModel):
    """
    Move thresholds.

    Attributes:
        alpha: A triangle splits when its probability exceeds alpha
        beta: A well merges when its internal probability is below beta
    """

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(default=1e-2, ge=0.0, le=1.0)
    beta: float = Field(default=3e-2, ge=0.0, le=1.0)

    def __init__(self, **data: Any) -> None:
        """
        Raises:
            ValidationError: If a threshold is outside [0, 1] or the pair refines without bound
        """
        try:
            super().__init__(**data)
        except PydanticValidationError as exc:
            messages = "; ".join(
                f"{'.'.join(str(p) for p in err.get('loc', ())) or 'thresholds'}: {err.get('msg')}"
                for err in exc.errors()
            )
            raise ValidationError("thresholds", messages) from exc

    @model_validator(mode="after")
    def reject_unbounded_refinement(self) -> "Thresholds":
        if self.alpha == 0.0 and self.beta == 1.0:
            raise ValueError("alpha = 0 with beta = 1 refines the grid without bound")
        return self

    @classmethod
    def paired(cls, alpha: float, ratio: float = 3.0) -> "Thresholds":
        """Thresholds with beta = ratio * alpha, clamped to 1."""
        return cls(alpha=alpha, beta=min(1.0, ratio * alpha))

    @property
    def regime(self) -> Regime:
        if self.beta > 6 * self.alpha:
            return Regime.UNSTABLE
        if self.beta < self.alpha:
            return Regime.QUASI_STABLE
        return Regime.INTERMEDIATE


class MoveKind(str, Enum):
    """Kinds of Pachner moves performed by the dynamics."""

    SPLIT = "split"
    MERGE = "merge"


class MoveRecord(BaseModel):
    """
    One entry of the move log.

    Attributes:
        step: Index of the step during which the move happened (1-based)
        kind: split or merge
        triangle_ids: split -> parent, N1, N2, N3; merge -> u, v, w, merged
        probability: Probability that triggered the move
    """

    step: int
    kind: MoveKind
    triangle_ids: list[int]
    probability: float


class ObservableRecord(BaseModel):
    """
    Per-step measurements.

    Curvatures are in radians; variances in squared edge lengths. moments[i]
    is the central moment of order i + 2 of the edge-midpoint distribution.
    """

    step: int
    norm: float
    wells_in_ball: int = 0
    curvature_signed: float = 0.0
    curvature_abs: float = 0.0
    mean_x: float = 0.0
    mean_y: float = 0.0
    var_x: float = 0.0
    var_y: float = 0.0
    var_total: float = 0.0
    moments: list[float] = Field(default_factory=list)
    eta: float | None = None


class FitResult(BaseModel):
    """
    Fit of the well count to t^a * exp(-b t^2) * c.

    Attributes:
        a: Power-law exponent
        b: Gaussian cut-off rate
        c: Normalization
        tmax: Last step with more than one well in the ball
        residual: Sum of squared residuals in log space
        points: Number of strictly positive samples used
        degenerate: True when too few positive samples exist to fit
    """

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    tmax: int = 0
    residual: float = 0.0
    points: int = 0
    degenerate: bool = False
