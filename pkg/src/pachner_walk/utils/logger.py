"""
Logging configuration and utilities.

This module sets up structured logging using structlog, normalizing the
numeric values the simulator logs so the JSON renderer always accepts them.
"""

import logging
import sys
from typing import Any

import numpy as np
import structlog

_PASSTHROUGH_KEYS = frozenset({"exc_info", "stack_info"})


def setup_logging(level: str = "INFO") -> None:
    """
    Configure structured logging for the application.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    """
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, level.upper(), logging.INFO),
    )

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.dev.set_exc_info,
            structlog.processors.TimeStamper(fmt="iso"),
            _normalize_processor,
            structlog.dev.ConsoleRenderer() if sys.stderr.isatty()
            else structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            getattr(logging, level.upper(), logging.INFO)
        ),
        context_class=dict,
        # sys.stderr is looked up per logger, not once at configure time.
        logger_factory=lambda *args: structlog.PrintLogger(sys.stderr),
        cache_logger_on_first_use=False,
    )


def _normalize_value(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _normalize_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_normalize_value(v) for v in value]
    if isinstance(value, np.ndarray):
        return _normalize_value(value.tolist())
    if isinstance(value, np.generic):
        return _normalize_value(value.item())
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def _normalize_processor(logger: Any, method_name: str, event_dict: dict[str, Any]) -> dict[str, Any]:
    """
    Render complex numbers and numpy values as plain JSON types.

    Complex values become {"re": ..., "im": ...}; arrays become lists.
    """
    return {
        k: v if k in _PASSTHROUGH_KEYS else _normalize_value(v) for k, v in event_dict.items()
    }
