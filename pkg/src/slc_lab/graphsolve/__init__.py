"""Graph solver for R_theta = r over a totally geodesic base."""

from .curvature import Geometry, curvature_field, graph_geometry, principal_curvatures
from .diagnostics import BarrierDiagnostics, barrier_check
from .field import GraphField, SolveReport, SolverConfig
from .grids import FuchsianGrid, Grid, PolarGrid, RadialGrid, grid_from_spec
from .newton import newton_iterate, newton_solve
from .operator import linearized_operator, zeroth_order_field
from .perron import perron_solve

__all__ = [
    "BarrierDiagnostics",
    "FuchsianGrid",
    "Geometry",
    "GraphField",
    "Grid",
    "PolarGrid",
    "RadialGrid",
    "SolveReport",
    "SolverConfig",
    "barrier_check",
    "curvature_field",
    "grid_from_spec",
    "graph_geometry",
    "linearized_operator",
    "newton_iterate",
    "newton_solve",
    "perron_solve",
    "principal_curvatures",
    "zeroth_order_field",
]
