"""Perron-style iteration on rotationally symmetric profiles.

Starting from a supersolution (R_theta <= r everywhere), each sweep visits
overlapping windows of rings. On a window the height is replaced by the
solution of the local Dirichlet problem with the current values outside
(operation A), and the result is merged with the current iterate by a
pointwise minimum (operation B). Sweeps alternate direction.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError, ConvergenceError, NotStrictlyConvexError, PreconditionError
from .curvature import graph_geometry
from .field import GraphField, SolveReport, SolverConfig
from .grids import RadialGrid
from .newton import newton_iterate

# wide, half-overlapping windows: with 8-ring windows the correction crawls
# inward a few rings per sweep and 64-ring profiles need hundreds of sweeps
WINDOW = 32
STRIDE = 16
MAX_SWEEPS = 400
# a sweep that shrinks the residual by less than this factor counts as stalled
STALL_RATIO = 0.999
STALL_SWEEPS = 20


def windows(count: int, width: int = WINDOW, stride: int = STRIDE) -> list[slice]:
    """Overlapping index windows covering range(count)."""
    if width < 1 or not 0 < stride <= width:
        raise ConfigurationError(f"need width >= 1 and 0 < stride <= width, got {width}, {stride}")
    starts = list(range(0, max(count - width, 0) + 1, stride))
    if starts[-1] + width < count:
        starts.append(count - width)
    return [slice(s, min(s + width, count)) for s in starts]


def curvature_residual(grid, u, cfg: SolverConfig) -> np.ndarray:
    """R_theta - r at interior nodes."""
    return graph_geometry(grid, u, cfg.theta).r - cfg.target_r


def is_supersolution(grid, u, cfg: SolverConfig, tol: float | None = None) -> bool:
    tol = cfg.newton_tol if tol is None else tol
    return bool(np.all(curvature_residual(grid, u, cfg) <= tol))


def perron_start(grid: RadialGrid, cfg: SolverConfig, level: float, max_amp: float = 4.0) -> GraphField:
    """Dome level + a (1 - (rho/R)^2) with the smallest tried amplitude that is a supersolution.

    A flat interior above the boundary leaves a one-cell cliff at the rim,
    which the local Newton solves handle poorly; the dome spreads the drop.
    """
    from .. import barriers

    s = (grid.rho / grid.radius) ** 2
    D = barriers.dist_upper(cfg.params, cfg.target_r)
    amp = max(D - level, 0.0) + 0.05
    while amp <= max_amp:
        u = level + amp * (1.0 - s)
        u[grid.boundary] = level
        try:
            if is_supersolution(grid, u, cfg):
                return GraphField(grid, u)
        except NotStrictlyConvexError:
            pass
        amp *= 1.5
    raise PreconditionError(f"no dome supersolution over boundary level {level:.6g} up to amplitude {max_amp}")


def perron_solve(
    G0: GraphField,
    cfg: SolverConfig,
    width: int = WINDOW,
    stride: int = STRIDE,
    max_sweeps: int = MAX_SWEEPS,
) -> tuple[GraphField, SolveReport]:
    """Lower a supersolution by local replacement and minimum until R_theta = r."""
    grid = G0.grid
    if not isinstance(grid, RadialGrid):
        raise ConfigurationError(f"Perron iteration runs on RotSymProfile grids, got {grid.mode}")
    if cfg.n != grid.n:
        cfg = cfg.replace(n=grid.n)
    u = np.array(G0.u)
    F = curvature_residual(grid, u, cfg)
    worst = float(F.max())
    if worst > cfg.newton_tol:
        k = int(np.argmax(F))
        raise PreconditionError(
            f"start is not a supersolution: R_theta - r = {worst:.3e} at node {k}"
        )

    target = 10.0 * cfg.newton_tol
    interior = np.flatnonzero(grid.interior)
    wins = windows(interior.size, width, stride)
    report = SolveReport(converged=False, monotone=True)
    norm = float(np.max(np.abs(F)))
    report.residuals.append(norm)
    stalled = 0

    for sweep in range(max_sweeps):
        if norm <= target:
            report.converged = True
            break
        order = wins if sweep % 2 == 0 else wins[::-1]
        before = u.copy()
        for w in order:
            free = np.zeros(grid.size, dtype=bool)
            free[interior[w]] = True
            local, _ = newton_iterate(grid, u, cfg, free=free)
            u = np.minimum(u, local)
        if np.any(u > before):
            report.monotone = False
        report.sweeps = sweep + 1
        prev = norm
        norm = float(np.max(np.abs(curvature_residual(grid, u, cfg))))
        report.residuals.append(norm)
        stalled = stalled + 1 if norm > STALL_RATIO * prev else 0
        if stalled >= STALL_SWEEPS:
            report.message = f"stagnated at residual {norm:.3e} after {sweep + 1} sweeps"
            raise ConvergenceError(report.message, report)
    else:
        if norm <= target:
            report.converged = True

    report.iterations = report.sweeps
    if not report.converged:
        report.message = f"residual {norm:.3e} above {target:.1e} after {max_sweeps} sweeps"
        raise ConvergenceError(report.message, report)

    from .diagnostics import barrier_check, fill_report

    G = G0.with_heights(u)
    fill_report(report, G, cfg)
    report.barrier_flags = barrier_check(G, cfg.params, cfg.target_r).flags()
    return G, report
