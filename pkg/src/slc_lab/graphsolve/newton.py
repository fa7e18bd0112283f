"""Damped Newton iteration for R_theta(u) = r on the free nodes of a graph.

Three Jacobians are available:

``exact``     derivative of the discrete residual, from closed-form nodal
              partials chained through the difference matrices (default);
``fd``        central differences over a column colouring of the stencil;
``operator``  the linearized SL_r operator pushed through the implicit
              relation SL_R(A) = theta, plus the tangential drift term.

Only ``exact`` keeps the quadratic tail on fine polar grids: near the centre
the Jacobian entries are of size 1/h^4 while the smooth modes that matter
are O(1), which central differences cannot resolve.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from ..errors import ConvergenceError, NotStrictlyConvexError
from .curvature import graph_geometry, jet_partials
from .field import GraphField, SolveReport, SolverConfig
from .grids import Grid
from .operator import assemble

FD_REL_STEP = 1e-5


def color_columns(pattern: sp.csr_matrix) -> np.ndarray:
    """Greedy colouring so that no row touches two columns of the same colour."""
    pattern = sp.csr_matrix(pattern)
    conflict = (pattern.T @ pattern).tocsr()
    ncol = pattern.shape[1]
    colors = np.full(ncol, -1, dtype=int)
    for j in range(ncol):
        nb = conflict.indices[conflict.indptr[j] : conflict.indptr[j + 1]]
        used = set(colors[nb][colors[nb] >= 0].tolist())
        c = 0
        while c in used:
            c += 1
        colors[j] = c
    return colors


class Residual:
    """F(u) = R_theta(u) - r on the free nodes, plus its Jacobian."""

    def __init__(self, grid: Grid, theta: float, target: float, free: np.ndarray):
        self.grid, self.theta, self.target = grid, theta, target
        self.free = np.flatnonzero(free)
        pat = grid.pattern()[self.free][:, self.free]
        self.pattern = sp.csr_matrix(pat)
        self.colors = color_columns(self.pattern)
        self.ncolors = int(self.colors.max()) + 1 if self.colors.size else 0
        self.evaluations = 0
        # curvature reacts to a nudge like step / spacing^2, so shrink steps where nodes crowd
        self.step_scale = grid.spacing_ratio()[self.free] ** 2

    def __call__(self, u) -> np.ndarray:
        self.evaluations += 1
        return graph_geometry(self.grid, u, self.theta, rows=self.free).r - self.target

    def discrete_jacobian(self, u) -> sp.csr_matrix:
        u = np.asarray(u, dtype=float)
        step = FD_REL_STEP * (1.0 + np.abs(u[self.free])) * self.step_scale
        diffs = np.empty((self.ncolors, self.free.size))
        for c in range(self.ncolors):
            cols = self.colors == c
            up, um = u.copy(), u.copy()
            up[self.free[cols]] += step[cols]
            um[self.free[cols]] -= step[cols]
            diffs[c] = self(up) - self(um)
        J = self.pattern.copy().tocoo()
        J.data = diffs[self.colors[J.col], J.row] / (2.0 * step[J.col])
        return J.tocsr()

    def exact_jacobian(self, u) -> sp.csr_matrix:
        grid = self.grid
        geo = graph_geometry(grid, u, self.theta, rows=self.free)
        d_u, d_ua, d_uab = jet_partials(grid, geo)
        N = grid.size

        def rows_diag(v):
            full = np.zeros(N)
            full[self.free] = v
            return sp.diags(full)

        J = rows_diag(d_u)
        for a in range(grid.n):
            J = J + rows_diag(d_ua[:, a]) @ grid.D1[a]
            for b in range(grid.n):
                J = J + rows_diag(d_uab[:, a, b]) @ grid.D2[a][b]
        J = J.tocsr()[self.free][:, self.free]
        return J.tocsr()

    def jacobian(self, u, kind: str) -> sp.csr_matrix:
        if kind == "exact":
            return self.exact_jacobian(u)
        if kind == "fd":
            return self.discrete_jacobian(u)
        return self.operator_jacobian(u)

    def operator_jacobian(self, u) -> sp.csr_matrix:
        grid = self.grid
        geo = graph_geometry(grid, u, self.theta, rows=self.free)
        R = geo.r
        op, _ = assemble(grid, geo, R)
        lam = geo.vals
        dsl_dr = np.sum(lam / (1.0 + (R[:, None] * lam) ** 2), axis=-1)
        w = np.zeros(grid.size)
        w[self.free] = geo.lapse
        # dR = -(R / dSL/dr) L (w du) + t^a d_a R du
        normal = sp.diags(-R / dsl_dr) @ (op[self.free] @ sp.diags(w))[:, self.free]
        Rfull = np.full(grid.size, self.target)
        Rfull[self.free] = R
        t = geo.tangential()
        drift = sum(t[:, a] * (grid.D1[a] @ Rfull)[self.free] for a in range(grid.n))
        return (normal + sp.diags(drift)).tocsr()


def newton_iterate(
    grid: Grid,
    u0,
    cfg: SolverConfig,
    free: np.ndarray | None = None,
    raise_on_failure: bool = True,
):
    """Core loop on a raw height array. Returns (u, report)."""
    free = grid.interior.copy() if free is None else np.asarray(free, dtype=bool) & grid.interior
    res = Residual(grid, cfg.theta, cfg.target_r, free)
    u = np.array(u0, dtype=float)
    report = SolveReport(converged=False)
    try:
        F = res(u)
    except NotStrictlyConvexError as exc:
        report.message = str(exc)
        if raise_on_failure:
            raise
        return u, report
    norm = float(np.max(np.abs(F))) if F.size else 0.0
    report.residuals.append(norm)

    for it in range(cfg.max_iter + 1):
        if norm <= cfg.newton_tol:
            report.converged = True
            break
        if it == cfg.max_iter:
            break
        J = res.jacobian(u, cfg.jacobian)
        du = np.atleast_1d(spsolve(sp.csc_matrix(J), -F))
        t = cfg.damping
        accepted = False
        for k in range(cfg.max_halvings + 1):
            trial = u.copy()
            trial[res.free] += t * du
            if np.all(trial >= 0.0):
                try:
                    Ft = res(trial)
                except NotStrictlyConvexError:
                    Ft = None
                if Ft is not None:
                    nt = float(np.max(np.abs(Ft)))
                    if nt <= norm or nt <= cfg.newton_tol:
                        accepted = True
                        break
            t *= 0.5
            report.halvings += 1
        if not accepted:
            report.message = f"no admissible step after {cfg.max_halvings} halvings at iteration {it}"
            report.iterations = it
            if raise_on_failure:
                raise ConvergenceError(report.message, report)
            return u, report
        u, F, norm = trial, Ft, nt
        report.residuals.append(norm)
        report.iterations = it + 1

    if not report.converged:
        report.message = f"residual {norm:.3e} above tolerance after {cfg.max_iter} iterations"
        if raise_on_failure:
            raise ConvergenceError(report.message, report)
    return u, report


def newton_solve(G0: GraphField, cfg: SolverConfig, free=None) -> tuple[GraphField, SolveReport]:
    """Solve R_theta = cfg.target_r with the boundary heights of G0 held fixed."""
    from .diagnostics import barrier_check, fill_report

    if cfg.n != G0.n:
        cfg = cfg.replace(n=G0.n)
    u, report = newton_iterate(G0.grid, G0.u, cfg, free=free)
    G = G0.with_heights(u)
    fill_report(report, G, cfg)
    report.barrier_flags = barrier_check(G, cfg.params, cfg.target_r).flags()
    return G, report
