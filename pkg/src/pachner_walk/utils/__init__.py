"""
Utility modules for Pachner Walk.

This package contains configuration loading and logging setup.
"""

from pachner_walk.utils.config import Config, RunConfig
from pachner_walk.utils.logger import setup_logging

__all__ = [
    "Config",
    "RunConfig",
    "setup_logging",
]
