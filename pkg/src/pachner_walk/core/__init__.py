"""
Core Pachner Walk functionality.

This package contains the simulator itself:
- Labeled triangulation and Pachner moves (grid)
- Quantum field, coins and gauge (walker)
- Coupled timestep and move scheduling (dynamics)
- Measurements (observables) and the flat-lattice oracle
"""

from pachner_walk.core.dynamics import SimState
from pachner_walk.core.grid import Triangulation
from pachner_walk.core.simulation import Simulation
from pachner_walk.core.walker import CoinSet, Field

__all__ = [
    "Simulation",
    "SimState",
    "Triangulation",
    "CoinSet",
    "Field",
]
