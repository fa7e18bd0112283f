"""Linearization of SL_r under normal variations of a graph.

For a normal variation with speed f (along the outward unit normal),

    (1/r) d/de SL_r = -Tr((I + r^2 A^2)^-1 Hess f) + Tr((I - A^2)(I + r^2 A^2)^-1) f,

with Hess the covariant Hessian of the induced metric. In coordinates the
first term is -C^{ab} (f_ab - Gamma^c_ab f_c) where C = g^-1 (I + r^2 A^2)^-1.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..symcurv import AngleParams
from .curvature import Geometry, graph_geometry
from .field import GraphField
from .grids import Grid


def _coefficients(geo: Geometry, r):
    r = np.broadcast_to(np.asarray(r, dtype=float), geo.rows.shape)
    lam = geo.vals
    m = 1.0 / (1.0 + (r[:, None] * lam) ** 2)
    # (I + r^2 S^2)^-1 in the orthonormal frame, then pulled back through L
    Mt = np.einsum("kij,kj,klj->kil", geo.vecs, m, geo.vecs)
    Linv = np.linalg.inv(geo.L)
    C = np.einsum("kia,kij,kjb->kab", Linv, Mt, Linv)
    c0 = np.sum((1.0 - lam * lam) * m, axis=-1)
    return C, c0


def assemble(grid: Grid, geo: Geometry, r) -> tuple[sp.csr_matrix, np.ndarray]:
    """Sparse operator on all nodes (identity on Dirichlet rows) and its zeroth-order field."""
    N, n = grid.size, grid.n
    C, c0 = _coefficients(geo, r)
    Gam = geo.christoffel()
    rows = geo.rows

    def full(vals):
        out = np.zeros(N)
        out[rows] = vals
        return out

    op = sp.diags(full(c0))
    for a in range(n):
        for b in range(n):
            op = op - sp.diags(full(C[:, a, b])) @ grid.D2[a][b]
    for c in range(n):
        first = np.einsum("kab,kab->k", C, Gam[..., c])
        op = op + sp.diags(full(first)) @ grid.D1[c]
    keep = np.zeros(N)
    keep[rows] = 1.0
    op = sp.diags(keep) @ op + sp.diags(1.0 - keep)
    zeroth = np.full(N, np.nan)
    zeroth[rows] = c0
    return op.tocsr(), zeroth


def linearized_operator(G: GraphField, p: AngleParams, r: float) -> sp.csr_matrix:
    """(1/r) times the derivative of SL_r along normal speeds f, as a sparse matrix."""
    geo = graph_geometry(G.grid, G.u, p.theta)
    return assemble(G.grid, geo, r)[0]


def zeroth_order_field(G: GraphField, p: AngleParams, r: float) -> np.ndarray:
    """Zeroth-order coefficient Tr((I - A^2)(I + r^2 A^2)^-1) per node (NaN on boundary)."""
    geo = graph_geometry(G.grid, G.u, p.theta)
    return assemble(G.grid, geo, r)[1]


def normal_displacement(G: GraphField, p: AngleParams, f, eps: float) -> np.ndarray:
    """Ambient points cosh(eps f) P + sinh(eps f) N at every node.

    Boundary nodes get f's value too; callers keep f = 0 there.
    """
    grid = G.grid
    geo = graph_geometry(grid, G.u, p.theta, rows=np.arange(grid.size), check_convex=False)
    f = np.asarray(f, dtype=float)
    return np.cosh(eps * f)[:, None] * geo.P + np.sinh(eps * f)[:, None] * geo.N


def embedding_points(G: GraphField) -> np.ndarray:
    E = np.zeros(G.grid.ambient_dim)
    E[-1] = 1.0
    u = G.u
    return np.cosh(u)[:, None] * G.grid.X + np.sinh(u)[:, None] * E
