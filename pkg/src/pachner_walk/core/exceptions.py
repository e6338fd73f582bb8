"""
Custom exceptions for Pachner Walk.

This module defines the exception hierarchy used throughout the simulator.
All exceptions inherit from PachnerWalkError for easy catching.
"""

from typing import Any


class PachnerWalkError(Exception):
    """Base exception for all Pachner Walk errors."""

    def __init__(
        self,
        message: str,
        code: str,
        details: dict[str, Any] | None = None,
    ) -> None:
        """
        Initialize PachnerWalkError.

        Args:
            message: Human-readable error message
            code: Machine-readable error code (e.g., "TRIANGLE_NOT_FOUND")
            details: Additional context about the error
        """
        self.message = message
        self.code = code
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> dict[str, Any]:
        """Convert exception to dictionary for serialization."""
        return {
            "error": {
                "code": self.code,
                "message": self.message,
                "details": self.details,
            }
        }


class TriangleNotFoundError(PachnerWalkError):
    """Raised when an operation refers to a triangle that is not live."""

    def __init__(self, triangle_id: int) -> None:
        super().__init__(
            message=f"Triangle {triangle_id} is not live",
            code="TRIANGLE_NOT_FOUND",
            details={"triangle_id": triangle_id},
        )


class VertexNotFoundError(PachnerWalkError):
    """Raised when an operation refers to a vertex that is not live."""

    def __init__(self, vertex_id: int) -> None:
        super().__init__(
            message=f"Vertex {vertex_id} is not live",
            code="VERTEX_NOT_FOUND",
            details={"vertex_id": vertex_id},
        )


class ConfigurationError(PachnerWalkError):
    """Raised when configuration is invalid or missing."""

    def __init__(self, message: str, config_key: str | None = None) -> None:
        details = {"config_key": config_key} if config_key else {}
        super().__init__(
            message=message,
            code="CONFIGURATION_ERROR",
            details=details,
        )


class ValidationError(PachnerWalkError):
    """Raised when input validation fails."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(
            message=f"Validation error for '{field}': {message}",
            code="VALIDATION_ERROR",
            details={"field": field},
        )


class NonUnitaryCoinError(PachnerWalkError):
    """Raised when a coin or gauge matrix is not unitary."""

    def __init__(self, name: str, deviation: float) -> None:
        super().__init__(
            message=f"Coin '{name}' is not unitary (max deviation {deviation:.3e})",
            code="NON_UNITARY_COIN",
            details={"coin": name, "deviation": deviation},
        )


class InvariantViolationError(PachnerWalkError):
    """Raised when a structural or conservation invariant is broken."""

    def __init__(
        self,
        invariant: str,
        message: str,
        details: dict[str, Any] | None = None,
        code: str = "INVARIANT_VIOLATION",
    ) -> None:
        merged = {"invariant": invariant}
        if details:
            merged.update(details)
        super().__init__(
            message=f"{invariant}: {message}",
            code=code,
            details=merged,
        )


class NotACycleError(InvariantViolationError):
    """Raised when a merge is requested on triangles that are not a 3-cycle."""

    def __init__(self, triangles: tuple[int, ...]) -> None:
        super().__init__(
            invariant="three_cycle",
            message=f"Triangles {list(triangles)} do not form a 3-cycle",
            details={"triangles": list(triangles)},
            code="NOT_A_CYCLE",
        )


class RayRevisitError(InvariantViolationError):
    """Raised when a translation ray visits the same triangle twice."""

    def __init__(self, triangle_id: int, trace: list[int]) -> None:
        super().__init__(
            invariant="ray_visits_once",
            message=f"Translation ray revisited triangle {triangle_id}",
            details={"triangle_id": triangle_id, "trace": trace},
            code="RAY_REVISIT",
        )
