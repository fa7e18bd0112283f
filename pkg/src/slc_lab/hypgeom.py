"""Hyperboloid-model primitives for H^{n+1} inside Minkowski space R^{1,n+1}.

Convention: <x, y> = -x0 y0 + sum_{i>=1} x_i y_i. Points satisfy <v, v> = -1,
v0 > 0. The fixed totally geodesic H^n is the slice {x_{n+1} = 0}, with unit
normal E = e_{n+1}.

Second fundamental forms use II_ab = -<P_ab, N> with N the outward normal,
so geodesic spheres, horospheres and equidistants bulging away from the
convex side all come out positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, FlowSingularityError, NotImmersedError
from .symcurv import Spectrum

NORM_TOL = 1e-10
COND_LIMIT = 1e8


def mdot(x, y):
    """Minkowski product over the last axis (broadcasts)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.sum(x[..., 1:] * y[..., 1:], axis=-1) - x[..., 0] * y[..., 0]


def to_hyperboloid(v) -> np.ndarray:
    """Rescale a timelike vector onto the upper sheet."""
    v = np.asarray(v, dtype=float)
    q = -mdot(v, v)
    if np.any(q <= 0):
        raise DomainError("vector is not timelike")
    out = v / np.sqrt(q)[..., None]
    return np.where(out[..., :1] < 0, -out, out)


def distance(x, y):
    """Hyperbolic distance arccosh(-<x, y>)."""
    return np.arccosh(np.maximum(-mdot(x, y), 1.0))


@dataclass(frozen=True)
class HPoint:
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise DomainError("HPoint needs a 1-D coordinate vector of length >= 2")
        v = to_hyperboloid(v)
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def dim(self) -> int:
        """Dimension of the hyperbolic space containing the point."""
        return self.v.size - 1

    @classmethod
    def origin(cls, dim: int) -> "HPoint":
        v = np.zeros(dim + 1)
        v[0] = 1.0
        return cls(v)


@dataclass(frozen=True)
class UnitTangent:
    base: HPoint
    dir: np.ndarray

    def __post_init__(self):
        b = self.base.v
        d = np.asarray(self.dir, dtype=float)
        if d.shape != b.shape:
            raise DomainError("tangent and base point have different dimensions")
        d = d + mdot(b, d) * b
        nn = mdot(d, d)
        if not nn > 0:
            raise DomainError("tangent direction has zero length")
        d = d / math.sqrt(nn)
        d.setflags(write=False)
        object.__setattr__(self, "dir", d)


def exp_point(u: UnitTangent, t: float) -> HPoint:
    return HPoint(math.cosh(t) * u.base.v + math.sinh(t) * u.dir)


def geodesic_velocity(u: UnitTangent, t: float) -> UnitTangent:
    """Parallel transport of u.dir along its own geodesic to time t."""
    p = exp_point(u, t)
    return UnitTangent(p, math.sinh(t) * u.base.v + math.cosh(t) * u.dir)


def fermi_embed(x, u, ambient: bool = False):
    """Point at signed distance u from the base H^n above chart point x.

    ``x`` is a point of H^n given in R^{n+1}, or in R^{n+2} with last
    coordinate 0 when ``ambient`` is true. Vectorized over leading axes.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if ambient:
        if np.any(x[..., -1] != 0.0):
            raise DomainError("ambient chart point must have last coordinate 0")
        base = x
    else:
        base = np.concatenate([x, np.zeros(x.shape[:-1] + (1,))], axis=-1)
    if np.any(np.abs(mdot(base, base) + 1.0) > 1e-8):
        raise DomainError("chart point is not on the hyperboloid")
    e = np.zeros(base.shape[-1])
    e[-1] = 1.0
    return np.cosh(u)[..., None] * base + np.sinh(u)[..., None] * e


def height_above_base(P):
    """Signed distance from P to the slice {x_{n+1} = 0}."""
    P = np.asarray(P, dtype=float)
    return np.arcsinh(P[..., -1])


def tube_embed(s, w, d):
    """Point at distance d from the geodesic cosh(s) e0 + sinh(s) e1.

    ``w`` is a unit vector of R^n giving the normal direction in the span of
    e2, ..., e_{n+1}.
    """
    if not d > 0:
        raise DomainError(f"tube radius must be positive, got {d!r}")
    w = np.asarray(w, dtype=float)
    s = np.asarray(s, dtype=float)
    axis = np.stack([np.cosh(s), np.sinh(s)], axis=-1)
    axis = np.broadcast_to(axis, np.broadcast_shapes(axis.shape, w.shape[:-1] + (2,)))
    ww = np.broadcast_to(w, axis.shape[:-1] + w.shape[-1:])
    return np.concatenate([math.cosh(d) * axis, math.sinh(d) * ww], axis=-1)


def distance_to_axis(P):
    """Distance from P to the geodesic in the (e0, e1) plane."""
    P = np.asarray(P, dtype=float)
    return np.arcsinh(np.linalg.norm(P[..., 2:], axis=-1))


def normal_flow_eigenvalue(lam: float, d: float) -> float:
    """Solution at time d of lambda' = 1 - lambda^2 started from lam."""
    if lam == math.inf:
        return 1.0 / math.tanh(d) if d > 0 else math.inf
    if abs(lam) < 1.0:
        return math.tanh(d + math.atanh(lam))
    if lam == 1.0 or lam == -1.0:
        return lam
    a = 0.5 * math.log((lam + 1.0) / (lam - 1.0))  # arcoth
    if lam < -1.0 and d >= -a:
        raise FlowSingularityError(
            f"curvature {lam!r} blows up at distance {-a:.12g} <= {d!r}", critical_distance=-a
        )
    return 1.0 / math.tanh(d + a)


def normal_flow_shape(lam0: Spectrum, d: float) -> Spectrum:
    """Principal curvatures of the parallel hypersurface at distance d."""
    if d < 0:
        raise DomainError(f"flow distance must be >= 0, got {d!r}")
    return Spectrum(tuple(normal_flow_eigenvalue(float(v), d) for v in lam0.values))


# ---------------------------------------------------------------------------
# fundamental forms


def frame_normal(P, Pa, ref=None):
    """Unit spacelike normal to span(P, P_a), batched.

    P: (..., m), Pa: (..., n, m). When ``ref`` is given the normal is its
    Minkowski projection off that span (so <N, ref> > 0). Otherwise the
    orientation is the one making det[P, N, P_1, ..., P_n] positive, which
    is outward for spheres in hyperspherical coordinates.
    """
    P = np.asarray(P, dtype=float)
    Pa = np.asarray(Pa, dtype=float)
    B = np.concatenate([P[..., None, :], Pa], axis=-2)  # (..., n+1, m)
    JB = B.copy()
    JB[..., 0] *= -1.0
    G = JB @ np.swapaxes(B, -1, -2)  # Gram matrix in the Minkowski product
    if ref is None:
        # complement via the last right-singular vector of J B
        _, _, vt = np.linalg.svd(JB)
        N = vt[..., -1, :]
        frame = np.concatenate([P[..., None, :], N[..., None, :], Pa], axis=-2)
        sign = np.sign(np.linalg.det(frame))
        N = N * np.where(sign == 0, 1.0, sign)[..., None]
    else:
        ref = np.broadcast_to(np.asarray(ref, dtype=float), P.shape)
        c = np.linalg.solve(G, (JB @ ref[..., None]))[..., 0]
        N = ref - np.sum(c[..., :, None] * B, axis=-2)
    nn = mdot(N, N)
    if np.any(nn <= 0):
        raise NotImmersedError("normal vector is not spacelike")
    return N / np.sqrt(nn)[..., None]


def symmetric_shape(g, II):
    """S = L^-1 II L^-T with g = L L^T; same eigenvalues as g^-1 II."""
    L = np.linalg.cholesky(g)
    X = np.linalg.solve(L, II)
    S = np.linalg.solve(L, np.swapaxes(X, -1, -2))
    return 0.5 * (S + np.swapaxes(S, -1, -2)), L


def forms_from_jets(P, Pa, Pab, ref=None):
    """First and second fundamental forms and unit normal from embedding jets."""
    Pa = np.asarray(Pa, dtype=float)
    Pab = np.asarray(Pab, dtype=float)
    g = mdot(Pa[..., :, None, :], Pa[..., None, :, :])
    N = frame_normal(P, Pa, ref)
    II = -mdot(Pab, N[..., None, None, :])
    II = 0.5 * (II + np.swapaxes(II, -1, -2))
    return g, II, N


@dataclass(frozen=True)
class FundamentalForms:
    I: np.ndarray
    II: np.ndarray
    A: np.ndarray
    normal: np.ndarray

    @property
    def n(self) -> int:
        return self.I.shape[0]

    def symmetric_shape(self) -> np.ndarray:
        return symmetric_shape(self.I, self.II)[0]

    def principal_curvatures(self) -> Spectrum:
        return Spectrum(tuple(np.linalg.eigvalsh(self.symmetric_shape())))

    def self_adjoint_residual(self) -> float:
        IA = self.I @ self.A
        return float(np.max(np.abs(IA - IA.T)))


def fd_jets(patch: Callable, at, h: float):
    """Central-difference embedding jets (P, P_a, P_ab) of ``patch`` at ``at``."""
    x0 = np.asarray(at, dtype=float)
    n = x0.size
    P0 = np.asarray(patch(x0), dtype=float)
    e = np.eye(n) * h
    plus = [np.asarray(patch(x0 + e[a]), dtype=float) for a in range(n)]
    minus = [np.asarray(patch(x0 - e[a]), dtype=float) for a in range(n)]
    Pa = np.array([(plus[a] - minus[a]) / (2 * h) for a in range(n)])
    Pab = np.empty((n, n, P0.size))
    for a in range(n):
        Pab[a, a] = (plus[a] - 2 * P0 + minus[a]) / (h * h)
        for b in range(a + 1, n):
            pp = patch(x0 + e[a] + e[b])
            pm = patch(x0 + e[a] - e[b])
            mp = patch(x0 - e[a] + e[b])
            mm = patch(x0 - e[a] - e[b])
            Pab[a, b] = Pab[b, a] = (np.asarray(pp) - pm - mp + mm) / (4 * h * h)
    return P0, Pa, Pab


def fundamental_forms(patch: Callable, at, h: float, outward=None) -> FundamentalForms:
    """I, II and shape operator of a parametrized hypersurface by central differences.

    ``patch`` maps a parameter vector to a point of the hyperboloid. The
    normal is oriented towards ``outward`` (a vector, or a callable of the
    parameter) when given, otherwise by the frame-determinant rule of
    :func:`frame_normal`.
    """
    P, Pa, Pab = fd_jets(patch, at, h)
    ref = outward(np.asarray(at, dtype=float)) if callable(outward) else outward
    g = mdot(Pa[:, None, :], Pa[None, :, :])
    if not np.all(np.isfinite(g)) or np.linalg.cond(g) > COND_LIMIT or np.linalg.eigvalsh(g)[0] <= 0:
        raise NotImmersedError(f"degenerate frame at {tuple(np.atleast_1d(at))}")
    g, II, N = forms_from_jets(P, Pa, Pab, ref)
    A = np.linalg.solve(g, II)
    return FundamentalForms(g, II, A, N)


# ---------------------------------------------------------------------------
# model patches with known curvature


def sphere_direction(angles) -> np.ndarray:
    """Hyperspherical coordinates: unit vector of R^{k+1} from k angles."""
    angles = np.asarray(angles, dtype=float)
    k = angles.size
    out = np.ones(k + 1)
    for i, a in enumerate(angles):
        out[i] *= math.cos(a)
        out[i + 1 :] *= math.sin(a)
    return out


@dataclass(frozen=True)
class Patch:
    """A parametrized hypersurface with its outward reference field and exact curvatures."""

    func: Callable
    at: np.ndarray
    outward: Callable
    exact: tuple


def equidistant_patch(d: float, n: int, at=None) -> Patch:
    y0 = np.asarray(at if at is not None else np.linspace(0.3, -0.2, n), dtype=float)

    def chart(y):
        return np.concatenate([[math.sqrt(1.0 + y @ y)], y, [0.0]])

    def func(y):
        return fermi_embed(chart(y), d, ambient=True)

    def outward(y):
        e = np.zeros(n + 2)
        e[-1] = 1.0
        return math.sinh(d) * chart(y) + math.cosh(d) * e

    return Patch(func, y0, outward, (math.tanh(d),) * n)


def sphere_patch(rho: float, n: int, at=None) -> Patch:
    a0 = np.asarray(at if at is not None else np.full(n, 1.1), dtype=float)

    def func(a):
        w = sphere_direction(a)
        return np.concatenate([[math.cosh(rho)], math.sinh(rho) * w])

    def outward(a):
        w = sphere_direction(a)
        return np.concatenate([[math.sinh(rho)], math.cosh(rho) * w])

    return Patch(func, a0, outward, (1.0 / math.tanh(rho),) * n)


def horosphere_patch(n: int, at=None) -> Patch:
    # y = sinh(s) so that the difference quotients are not exact
    s0 = np.asarray(at if at is not None else np.linspace(0.4, -0.3, n), dtype=float)
    ideal = np.zeros(n + 2)
    ideal[0], ideal[-1] = 1.0, -1.0

    def func(s):
        y = np.sinh(s)
        q = 0.5 * (y @ y)
        return np.concatenate([[1.0 + q], y, [-q]])

    def outward(s):
        return func(s) - ideal

    return Patch(func, s0, outward, (1.0,) * n)


def tube_patch(d: float, n: int, at=None) -> Patch:
    x0 = np.asarray(at if at is not None else np.concatenate([[0.35], np.full(n - 1, 0.9)]), dtype=float)

    def func(x):
        return tube_embed(x[0], sphere_direction(x[1:]), d)

    def outward(x):
        s = x[0]
        w = sphere_direction(x[1:])
        axis = np.array([math.cosh(s), math.sinh(s)])
        return np.concatenate([math.sinh(d) * axis, math.cosh(d) * w])

    return Patch(func, x0, outward, (math.tanh(d),) + (1.0 / math.tanh(d),) * (n - 1))
