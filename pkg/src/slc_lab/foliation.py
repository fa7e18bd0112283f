"""Continuation in r through the family of constant-R_theta graphs, and theta sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import barriers
from .errors import ConvergenceError, DomainError, NotStrictlyConvexError
from .graphsolve.diagnostics import BarrierDiagnostics, barrier_check
from .graphsolve.field import GraphField, SolveReport, SolverConfig
from .graphsolve.grids import FuchsianGrid, Grid, PolarGrid, RadialGrid
from .graphsolve.newton import newton_solve
from .symcurv import AngleParams

# Dirichlet data for disk leaves: a fixed fraction of the upper barrier with an angular ripple
BOUNDARY_FRACTION = 0.9
BOUNDARY_RIPPLE = 0.05


def fuchsian_exact(p: AngleParams, r: float) -> float:
    """Height of the constant-curvature equidistant leaf, artanh(tan(theta/n) / r)."""
    return barriers.dist_upper(p, r)


def fuchsian_certificate(p: AngleParams, r: float, tol: float = 1e-9) -> float:
    """|Newton solution - closed form| for a single-node Fuchsian solve."""
    cfg = SolverConfig(p.theta, r, n=p.n, newton_tol=tol)
    G, _ = newton_solve(GraphField.constant(FuchsianGrid(p.n), 1.0), cfg)
    return abs(float(G.u[0]) - fuchsian_exact(p, r))


def default_boundary(grid: Grid, p: AngleParams, r: float) -> np.ndarray:
    """Boundary heights b_r = 0.9 dist_upper(r) (1 + 0.05 cos 2 phi); zero-angle modes drop the ripple.

    Scaling the data with dist_upper keeps each leaf under the upper barrier
    and orders the data of different leaves the same way as the leaves.
    """
    level = BOUNDARY_FRACTION * barriers.dist_upper(p, r)
    if isinstance(grid, PolarGrid):
        return level * (1.0 + BOUNDARY_RIPPLE * np.cos(2.0 * grid.phi))
    return np.full(grid.size, level)


def initial_guess(grid: Grid, boundary: np.ndarray, p: AngleParams, r: float) -> np.ndarray:
    """Smooth convex start matching ``boundary`` on the rim."""
    if isinstance(grid, FuchsianGrid):
        return np.full(1, fuchsian_exact(p, r))
    s = (grid.rho / grid.radius) ** 2
    level = float(np.mean(boundary[grid.boundary]))
    # ripple fades toward the centre; a shallow dome keeps the start strictly convex
    return level + (boundary - level) * s + 0.05 * level * (1.0 - s)


@dataclass
class SweepRecord:
    r: float
    field: GraphField
    max_height: float
    min_height: float
    diagnostics: BarrierDiagnostics
    iterations: int
    report: SolveReport
    degraded: bool = False

    def row(self, theta: float) -> dict:
        return {
            "r": self.r,
            "theta": theta,
            "max_height": self.max_height,
            "min_height": self.min_height,
            "dist_upper": self.diagnostics.dist_upper,
            "coverage_depth": self.diagnostics.coverage_depth,
            "converged": bool(self.report.converged),
        }


@dataclass
class Sweep:
    theta: float
    records: list = field(default_factory=list)
    truncated: bool = False
    message: str = ""

    def heights(self) -> np.ndarray:
        return np.stack([rec.field.u for rec in self.records])

    def gaps(self) -> np.ndarray:
        """Minimum interior gap u_{r_i} - u_{r_j} between consecutive leaves ordered by increasing r."""
        recs = sorted(self.records, key=lambda rec: rec.r)
        out = []
        for a, b in zip(recs, recs[1:]):
            inside = a.field.grid.interior
            out.append(float(np.min((a.field.u - b.field.u)[inside])))
        return np.array(out)

    def rows(self) -> list[dict]:
        return [rec.row(self.theta) for rec in self.records]


def default_schedule(p: AngleParams, count: int = 6, top: float = 10.0) -> list[float]:
    """Descending r from top * tan(theta/n) toward the threshold, geometrically."""
    thr = p.threshold
    return [thr * (1.0 + (top - 1.0) * 0.5**k) for k in range(count)]


def sweep(
    cfg: SolverConfig,
    r_values: Iterable[float] | None = None,
    grid: Grid | None = None,
    boundary: Callable[[Grid, AngleParams, float], np.ndarray] = default_boundary,
) -> Sweep:
    """Solve one leaf per r, each warm-started from the previous one.

    The warm start rescales the previous leaf by the ratio of upper barriers,
    which is exact for equidistants. A failed member truncates the sweep.

    Leaves are solved to newton_tol * max(1, r): on polar grids the centre
    ring amplifies rounding of u into R by a factor of order r, so an
    absolute tolerance stops being reachable for large r.
    """
    p = cfg.params
    grid = PolarGrid(cfg.h, cfg.rings, cfg.angles) if grid is None else grid
    if grid.n != p.n:
        raise DomainError(f"grid dimension {grid.n} does not match n={p.n}")
    r_values = default_schedule(p) if r_values is None else [float(r) for r in r_values]
    for r in r_values:
        if not r > p.threshold:
            raise DomainError(f"r={r!r} below threshold tan(theta/n)={p.threshold:.12g}")

    out = Sweep(theta=p.theta)
    prev: tuple[float, np.ndarray] | None = None
    for r in r_values:
        b = boundary(grid, p, r)
        if prev is None:
            u0 = initial_guess(grid, b, p, r)
        else:
            scale = barriers.dist_upper(p, r) / barriers.dist_upper(p, prev[0])
            u0 = prev[1] * scale
        u0 = np.where(grid.interior, u0, b)
        try:
            leaf_cfg = cfg.replace(target_r=r, newton_tol=cfg.newton_tol * max(1.0, r))
            G, rep = newton_solve(GraphField(grid, u0), leaf_cfg)
        except (ConvergenceError, NotStrictlyConvexError) as exc:
            out.truncated = True
            out.message = f"leaf r={r:.12g} failed: {exc}"
            break
        diag = barrier_check(G, p, r)
        u_in = G.u[grid.interior]
        out.records.append(
            SweepRecord(
                r=r,
                field=G,
                max_height=float(u_in.max()),
                min_height=float(u_in.min()),
                diagnostics=diag,
                iterations=rep.iterations,
                report=rep,
                degraded=not diag.clean,
            )
        )
        prev = (r, G.u)
    return out


@dataclass
class CoverageTable:
    n: int
    rows: list = field(default_factory=list)
    monotone: bool = True

    def depths(self) -> np.ndarray:
        return np.array([row["coverage_depth"] for row in self.rows])


def theta_sweep(
    theta_values: Iterable[float],
    n: int = 2,
    r_schedule: Callable[[float], float] | None = None,
) -> CoverageTable:
    """coverage_depth along a theta schedule; r defaults to the threshold tan(theta/n).

    ``monotone`` records whether the depth grows with theta; it is only
    meaningful for the threshold schedule.
    """
    thetas = sorted(float(t) for t in theta_values)
    table = CoverageTable(n=n)
    for theta in thetas:
        p = AngleParams(theta, n)
        r = p.threshold if r_schedule is None else float(r_schedule(theta))
        depth = barriers.coverage_depth(p, r)
        upper = barriers.dist_upper(p, r) if r > p.threshold else math.inf
        table.rows.append({"theta": theta, "r": r, "coverage_depth": depth, "dist_upper": upper})
    d = table.depths()
    table.monotone = bool(np.all(np.diff(d) > 0)) if d.size > 1 else True
    return table
