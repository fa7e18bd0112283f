"""Barrier diagnostics for solved or candidate graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import barriers
from ..errors import NotStrictlyConvexError
from ..symcurv import COMPARE_TOL, AngleParams
from .curvature import principal_curvatures
from .field import GraphField, SolveReport, SolverConfig
from .grids import FuchsianGrid


@dataclass
class BarrierDiagnostics:
    theta: float
    r: float
    n: int
    dist_upper: float
    delta_lower: float
    coverage_depth: float
    slack: float
    upper: list = field(default_factory=list)
    coverage: list = field(default_factory=list)
    delta: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.upper and not self.coverage

    def flags(self) -> dict:
        return {
            "upper": len(self.upper),
            "coverage": len(self.coverage),
            "below_delta": len(self.delta),
            "clean": self.clean,
        }

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "r": self.r,
            "n": self.n,
            "dist_upper": self.dist_upper,
            "delta_lower": self.delta_lower,
            "coverage_depth": self.coverage_depth,
            "slack": self.slack,
            "upper_nodes": self.upper,
            "coverage_nodes": self.coverage,
            "below_delta_nodes": self.delta,
        }


def barrier_check(G: GraphField, p: AngleParams, r: float) -> BarrierDiagnostics:
    """Flag nodes above dist_upper + 2h^2, and (single-node compact mode) below coverage_depth - 2h^2.

    Nodes below delta_lower - 2h^2 are listed separately for information;
    that bound concerns distance to the convex core, which Dirichlet data
    need not respect.
    """
    rep = barriers.bound_report(p, r)
    slack = 2.0 * G.grid.h**2 + COMPARE_TOL
    u = G.u
    diag = BarrierDiagnostics(
        p.theta, float(r), p.n, rep.dist_upper, rep.delta_lower, rep.coverage_depth, slack
    )
    diag.upper = np.flatnonzero(u > rep.dist_upper + slack).tolist()
    if isinstance(G.grid, FuchsianGrid) and math.isfinite(rep.coverage_depth):
        diag.coverage = np.flatnonzero(u < rep.coverage_depth - slack).tolist()
    if math.isfinite(rep.delta_lower):
        diag.delta = np.flatnonzero(u < rep.delta_lower - slack).tolist()
    return diag


def fill_report(report: SolveReport, G: GraphField, cfg: SolverConfig) -> SolveReport:
    interior = G.u[G.grid.interior]
    report.min_height = float(interior.min())
    report.max_height = float(interior.max())
    try:
        report.min_curvature = float(principal_curvatures(G)[:, 0].min())
    except NotStrictlyConvexError:
        report.min_curvature = math.nan
    return report
