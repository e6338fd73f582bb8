"""
Pachner Walk - discrete-time quantum walk on a dynamical triangulation.

The walker lives on the edges of a triangulated surface; wherever its
probability concentrates, triangles split into wells (1-to-3 moves), and wells
the walker has left are merged back (3-to-1 moves).

Features:
    - Lazily materialized infinite flat grid with labeled triangles
    - Rotation and coin substeps with configurable unitaries
    - Threshold-driven Pachner moves with outward ray translation
    - Observables: wells, curvature, variance exponent, moments, heatmaps
    - Independent flat-lattice oracle

Example:
    >>> from pachner_walk import Simulation
    >>> sim = Simulation.from_dict({"alpha": 1e-3, "steps": 200})
    >>> result = sim.execute(write_outputs=False)
    >>> result.fit.tmax
"""

__version__ = "0.1.0"
__license__ = "MIT"

from pachner_walk.core.dynamics import SimState
from pachner_walk.core.grid import Triangulation
from pachner_walk.core.simulation import Simulation

__all__ = [
    "Simulation",
    "SimState",
    "Triangulation",
    "__version__",
]
