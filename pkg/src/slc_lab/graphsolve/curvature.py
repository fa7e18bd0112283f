"""Pointwise geometry of a Fermi graph and its special Lagrangian curvature.

For a height field u over the chart X of the base,

    P    = cosh(u) X + sinh(u) E
    V    = d P / d u = sinh(u) X + cosh(u) E
    P_a  = V u_a + cosh(u) X_a
    P_ab = P u_a u_b + V u_ab + sinh(u) (X_a u_b + X_b u_a) + cosh(u) X_ab

The height derivatives u_a, u_ab come from the grid's difference matrices;
X and its derivatives are exact. Constant heights therefore give the exact
equidistant geometry on any grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import ConfigurationError, NotStrictlyConvexError
from ..hypgeom import forms_from_jets, mdot, symmetric_shape
from ..symcurv import AngleParams
from .field import GraphField
from .grids import Grid, PolarGrid


@dataclass
class Geometry:
    rows: np.ndarray
    P: np.ndarray
    V: np.ndarray
    N: np.ndarray
    Pa: np.ndarray
    Pab: np.ndarray
    g: np.ndarray
    II: np.ndarray
    S: np.ndarray
    L: np.ndarray
    vals: np.ndarray
    vecs: np.ndarray
    r: np.ndarray
    u: np.ndarray
    ua: np.ndarray
    uab: np.ndarray

    @property
    def lapse(self) -> np.ndarray:
        """Normal component <V, N> of the height direction."""
        return mdot(self.V, self.N)

    def christoffel(self) -> np.ndarray:
        """Gamma[k, a, b, c] = g^{cd} <P_ab, P_d> at each evaluated node k."""
        G = mdot(self.Pab[:, :, :, None, :], self.Pa[:, None, None, :, :])
        ginv = np.linalg.inv(self.g)
        return np.einsum("kcd,kabd->kabc", ginv, G)

    def tangential(self) -> np.ndarray:
        """Coordinates t^a of the tangential part of V."""
        vb = mdot(self.V[:, None, :], self.Pa)
        return np.linalg.solve(self.g, vb[..., None])[..., 0]


def _height_jets(grid: Grid, u: np.ndarray, rows: np.ndarray):
    n = grid.n
    # stencils kill constants; differencing u - c keeps cancellation error small near the centre
    u = u - np.median(u)
    ua = np.stack([(grid.D1[a] @ u)[rows] for a in range(n)], axis=-1)
    uab = np.empty((rows.size, n, n))
    for a in range(n):
        for b in range(a, n):
            uab[:, a, b] = uab[:, b, a] = (grid.D2[a][b] @ u)[rows]
    return ua, uab


def graph_geometry(grid: Grid, u, theta: float, rows=None, check_convex: bool = True) -> Geometry:
    """Embedding jets, fundamental forms, principal curvatures and R_theta at ``rows``."""
    u = np.asarray(u, dtype=float)
    rows = np.flatnonzero(grid.interior) if rows is None else np.asarray(rows)
    ua, uab = _height_jets(grid, u, rows)
    X, Xa, Xab = grid.X[rows], grid.Xa[rows], grid.Xab[rows]
    ur = u[rows]
    cu, su = np.cosh(ur)[:, None], np.sinh(ur)[:, None]
    E = np.zeros(grid.ambient_dim)
    E[-1] = 1.0
    P = cu * X + su * E
    V = su * X + cu * E
    Pa = V[:, None, :] * ua[:, :, None] + cu[:, None] * Xa
    Pab = (
        P[:, None, None, :] * (ua[:, :, None] * ua[:, None, :])[..., None]
        + V[:, None, None, :] * uab[..., None]
        + su[:, None, None]
        * (Xa[:, :, None, :] * ua[:, None, :, None] + Xa[:, None, :, :] * ua[:, :, None, None])
        + cu[:, None, None] * Xab
    )
    g, II, N = forms_from_jets(P, Pa, Pab, ref=V)
    S, L = symmetric_shape(g, II)
    vals, vecs = kernels.jacobi_eigh(S)
    if check_convex and np.any(vals[:, 0] <= 0.0):
        k = int(np.argmin(vals[:, 0]))
        node = int(rows[k])
        raise NotStrictlyConvexError(
            f"not strictly convex at node {node} (smallest principal curvature {vals[k, 0]:.6g})",
            node=node,
        )
    r = kernels.r_theta(vals, theta) if check_convex else np.full(rows.size, np.nan)
    return Geometry(rows, P, V, N, Pa, Pab, g, II, S, L, vals, vecs, r, ur, ua, uab)


def jet_partials(grid: Grid, geo: Geometry):
    """Exact partial derivatives of the nodal R_theta with respect to u, u_a and u_ab.

    Returns (dR/du, dR/du_a, dR/du_ab) with shapes (B,), (B, n), (B, n, n);
    the last is split evenly between (a, b) and (b, a) so that contracting it
    with the symmetric difference matrices gives the full derivative.

    With A = g^-1 II, d tr arctan(R A) = R tr((I + R^2 A^2)^-1 dA) and
    dA = g^-1 (dII - dg A). The normal variation follows from N staying a
    unit vector orthogonal to P and the P_a.
    """
    rows = geo.rows
    n, B = grid.n, rows.size
    X, Xa, Xab = grid.X[rows], grid.Xa[rows], grid.Xab[rows]
    cu, su = np.cosh(geo.u)[:, None], np.sinh(geo.u)[:, None]
    P, V, N, Pa, Pab, g = geo.P, geo.V, geo.N, geo.Pa, geo.Pab, geo.g
    ua, uab = geo.ua, geo.uab
    eye = np.eye(n)

    # variations: index 0 is u, then u_c, then u_cd for c <= d
    pairs = [(c, d) for c in range(n) for d in range(c, n)]
    Q = 1 + n + len(pairs)
    m = P.shape[-1]
    dP = np.zeros((Q, B, m))
    dPa = np.zeros((Q, B, n, m))
    dPab = np.zeros((Q, B, n, n, m))

    dP[0] = V
    dPa[0] = P[:, None, :] * ua[:, :, None] + su[:, None] * Xa
    dPab[0] = (
        V[:, None, None, :] * (ua[:, :, None] * ua[:, None, :])[..., None]
        + P[:, None, None, :] * uab[..., None]
        + cu[:, None, None]
        * (Xa[:, :, None, :] * ua[:, None, :, None] + Xa[:, None, :, :] * ua[:, :, None, None])
        + su[:, None, None] * Xab
    )
    for c in range(n):
        q = 1 + c
        dPa[q, :, c] = V
        # d/du_c of P u_a u_b + sinh(u)(X_a u_b + X_b u_a)
        for a in range(n):
            for b in range(n):
                coef = eye[a, c] * ua[:, b] + ua[:, a] * eye[b, c]
                dPab[q, :, a, b] = P * coef[:, None] + su * (Xa[:, a] * eye[b, c] + Xa[:, b] * eye[a, c])
    for k, (c, d) in enumerate(pairs):
        q = 1 + n + k
        dPab[q, :, c, d] = V
        dPab[q, :, d, c] = V

    gam = mdot(Pab[:, :, :, None, :], Pa[:, None, None, :, :])  # <P_ab, P_c>
    ginv = np.linalg.inv(g)
    n_dP = mdot(N[None], dP)  # (Q, B)
    n_dPa = mdot(N[None, :, None, :], dPa)  # (Q, B, n)
    beta = np.einsum("kcd,qkd->qkc", ginv, n_dPa)
    dII = (
        -mdot(N[None, :, None, None, :], dPab)
        + n_dP[..., None, None] * g[None]
        + np.einsum("qkc,kabc->qkab", beta, gam)
    )
    pa_dpb = mdot(dPa[:, :, :, None, :], Pa[None, :, None, :, :])
    dg = pa_dpb + np.swapaxes(pa_dpb, -1, -2)

    R = geo.r
    lam = geo.vals
    mt = 1.0 / (1.0 + (R[:, None] * lam) ** 2)
    Mt = np.einsum("kij,kj,klj->kil", geo.vecs, mt, geo.vecs)
    SMt = np.einsum("kij,kj,klj->kil", geo.vecs, lam * mt, geo.vecs)
    Linv = np.linalg.inv(geo.L)
    C = np.einsum("kia,kij,kjb->kab", Linv, Mt, Linv)
    K = np.einsum("kia,kij,kjb->kab", Linv, SMt, Linv)
    dsl = R * (np.einsum("kab,qkab->qk", C, dII) - np.einsum("kab,qkab->qk", K, dg))
    dsl_dr = np.sum(lam * mt, axis=-1)
    dR = -dsl / dsl_dr

    d_u = dR[0]
    d_ua = dR[1 : 1 + n].T
    d_uab = np.zeros((B, n, n))
    for k, (c, d) in enumerate(pairs):
        if c == d:
            d_uab[:, c, c] = dR[1 + n + k]
        else:
            d_uab[:, c, d] = d_uab[:, d, c] = 0.5 * dR[1 + n + k]
    return d_u, d_ua, d_uab


def curvature_field(G: GraphField, p: AngleParams) -> np.ndarray:
    """R_theta at every node; NaN on Dirichlet boundary nodes."""
    if p.n != G.n:
        raise ConfigurationError(f"AngleParams.n={p.n} does not match graph dimension {G.n}")
    out = np.full(G.grid.size, np.nan)
    geo = graph_geometry(G.grid, G.u, p.theta)
    out[geo.rows] = geo.r
    return out


def principal_curvatures(G: GraphField) -> np.ndarray:
    """Ascending principal curvatures at interior nodes, shape (rows, n)."""
    return graph_geometry(G.grid, G.u, 1.0, check_convex=False).vals


def embedded_sl_r(grid: Grid, Q: np.ndarray, r: float, rows=None, outward=None) -> np.ndarray:
    """SL_r of an arbitrary embedded node field Q, by differencing the embedding itself.

    Only meaningful where the grid's difference matrices act on every
    coordinate direction, i.e. on :class:`PolarGrid`.
    """
    if not isinstance(grid, PolarGrid):
        raise ConfigurationError("embedding differences need a full 2-D grid")
    rows = np.flatnonzero(grid.interior) if rows is None else np.asarray(rows)
    n = grid.n
    Qa = np.stack([(grid.D1[a] @ Q)[rows] for a in range(n)], axis=1)
    Qab = np.empty((rows.size, n, n, Q.shape[1]))
    for a in range(n):
        for b in range(a, n):
            Qab[:, a, b] = Qab[:, b, a] = (grid.D2[a][b] @ Q)[rows]
    _, II, _ = forms_from_jets(Q[rows], Qa, Qab, ref=outward)
    g = mdot(Qa[:, :, None, :], Qa[:, None, :, :])
    S, _ = symmetric_shape(g, II)
    vals = np.linalg.eigvalsh(S)
    return np.sum(np.arctan(r * vals), axis=-1)
