"""Kulkarni-Pinkall metric on domains of the round sphere, sampled over inscribed balls.

The sphere S^n is the ideal boundary of H^{n+1} in the hyperboloid model.
A cap B = {x : x.c > cos(a)} bounds the totally geodesic hyperplane
P = m^perp with m = (cos a, c) / sin a. The geodesic leaving P orthogonally
at f ends at the ideal point [f + m], so the foot of the ideal point
xi = (1, x) is

    f(x) = xi / <xi, m> - m.

g_B is the pullback of P's metric by f; g_KP is the infimum over balls.
Points of S^n are handled through stereographic coordinates y from the
north pole, in which the round metric is 4 |dy|^2 / (1 + |y|^2)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, NotHyperbolicTypeError
from .hypgeom import mdot

FD_STEP = 1e-5
# refinement must beat the sampled ball by more than the difference-quotient noise
REFINE_GAIN = 1e-8
# deterministic probe set for the union hyperbolicity check
UNION_PROBES = 4096


def from_chart(y) -> np.ndarray:
    """Stereographic chart R^n -> S^n (north pole excluded)."""
    y = np.asarray(y, dtype=float)
    s = np.sum(y * y, axis=-1, keepdims=True)
    return np.concatenate([2.0 * y, s - 1.0], axis=-1) / (1.0 + s)


def to_chart(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    denom = 1.0 - x[..., -1:]
    if np.any(denom <= 1e-14):
        raise DomainError("the north pole has no stereographic coordinates")
    return x[..., :-1] / denom


def round_factor(y) -> float:
    """Conformal factor of the round metric in the chart."""
    y = np.asarray(y, dtype=float)
    return 4.0 / (1.0 + float(y @ y)) ** 2


def poincare_factor(y) -> float:
    """Hyperbolic metric of the unit chart ball relative to |dy|^2."""
    y = np.asarray(y, dtype=float)
    return 4.0 / (1.0 - float(y @ y)) ** 2


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _angle(a, b) -> np.ndarray:
    # chord form; arccos of the dot product loses all digits below ~1e-8
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return 2.0 * np.arctan2(np.linalg.norm(a - b, axis=-1), np.linalg.norm(a + b, axis=-1))


@dataclass(frozen=True)
class RoundBall:
    """Open cap {x in S^n : angle(x, center) < radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.center, dtype=float).reshape(-1)
        if c.size < 2 or not np.all(np.isfinite(c)) or np.linalg.norm(c) == 0:
            raise DomainError("ball center must be a nonzero vector in R^{n+1}, n >= 1")
        if not 0.0 < self.radius < math.pi:
            raise DomainError(f"angular radius must lie in (0, pi), got {self.radius!r}")
        c = _unit(c)
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def n(self) -> int:
        return self.center.size - 1

    @classmethod
    def from_chart(cls, y0, rho: float) -> "RoundBall":
        """Image of the chart ball |y - y0| < rho."""
        y0 = np.asarray(y0, dtype=float)
        n = y0.size
        if rho <= 0:
            raise DomainError("chart radius must be positive")
        # n + 1 boundary points pin down the plane x.c = cos(a) holding the cap's rim
        dirs = np.vstack([np.eye(n), -np.ones((1, n)) / math.sqrt(n)])
        rim = from_chart(y0 + rho * dirs)
        M = np.hstack([rim, -np.ones((n + 1, 1))])
        _, _, vt = np.linalg.svd(M)
        v = vt[-1]
        c, k = v[:-1], v[-1]
        scale = np.linalg.norm(c)
        c, k = c / scale, k / scale
        if from_chart(y0) @ c < k:
            c, k = -c, -k
        return cls(c, math.acos(np.clip(k, -1.0, 1.0)))

    @property
    def normal(self) -> np.ndarray:
        """Unit spacelike m with P = m^perp."""
        return np.concatenate([[math.cos(self.radius)], self.center]) / math.sin(self.radius)

    def contains(self, x, margin: float = 0.0) -> np.ndarray:
        return _angle(np.asarray(x, dtype=float), self.center) < self.radius - margin

    def rotated(self, Q) -> "RoundBall":
        return RoundBall(np.asarray(Q) @ self.center, self.radius)

    def foot(self, x) -> np.ndarray:
        """Foot points on P of the ideal points x (shape (..., n+1))."""
        x = np.asarray(x, dtype=float)
        xi = np.concatenate([np.ones(x.shape[:-1] + (1,)), x], axis=-1)
        m = self.normal
        return xi / mdot(xi, m)[..., None] - m


def ball_metric(B: RoundBall, y, step: float = FD_STEP) -> np.ndarray:
    """Pullback of the hyperbolic metric of B's hyperplane, as a matrix in chart coordinates at y."""
    y = np.asarray(y, dtype=float)
    n = y.size
    if n != B.n:
        raise DomainError(f"point has {n} chart coordinates, ball lives in S^{B.n}")
    if not B.contains(from_chart(y)):
        raise DomainError("point is not strictly inside the ball")
    shifts = step * np.eye(n)
    hi = B.foot(from_chart(y + shifts))
    lo = B.foot(from_chart(y - shifts))
    df = (hi - lo) / (2.0 * step)
    g = mdot(df[:, None, :], df[None, :, :])
    return 0.5 * (g + g.T)


def _conformal_factor(g: np.ndarray) -> float:
    return float(np.trace(g)) / g.shape[0]


# ---------------------------------------------------------------- domains


class SphericalDomain:
    """Open domain of S^n built from balls and finite point sets."""

    n: int

    def contains(self, x) -> np.ndarray:
        raise NotImplementedError

    def max_radius(self, c: np.ndarray) -> np.ndarray:
        """Largest a such that the cap (c, a) is guaranteed to lie in the domain (may be <= 0)."""
        raise NotImplementedError

    def balls(self) -> list[RoundBall]:
        """Balls appearing as leaves (natural candidates)."""
        return []

    def enclosing(self) -> list[RoundBall]:
        """Balls known to contain the whole domain."""
        return []

    def hyperbolic(self) -> bool:
        raise NotImplementedError

    def rotated(self, Q) -> "SphericalDomain":
        raise NotImplementedError

    def check(self) -> "SphericalDomain":
        if not self.hyperbolic():
            raise NotHyperbolicTypeError(
                "domain is of elliptic or parabolic type: its complement has fewer than two points"
            )
        return self


@dataclass
class Ball(SphericalDomain):
    ball: RoundBall

    @property
    def n(self) -> int:
        return self.ball.n

    def contains(self, x):
        return self.ball.contains(x)

    def max_radius(self, c):
        return self.ball.radius - _angle(c, self.ball.center)

    def balls(self):
        return [self.ball]

    def enclosing(self):
        return [self.ball]

    def hyperbolic(self) -> bool:
        return True

    def rotated(self, Q):
        return Ball(self.ball.rotated(Q))


@dataclass
class PointComplement(SphericalDomain):
    points: np.ndarray
    dim: int = field(default=0)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            pts = np.zeros((0, self.dim + 1))
        else:
            pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        self.points = pts
        self.dim = pts.shape[1] - 1
        if self.dim < 1:
            raise DomainError("point complement needs the ambient dimension")

    @property
    def n(self) -> int:
        return self.dim

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        if len(self.points) == 0:
            return np.ones(x.shape[:-1], dtype=bool)
        d = _angle(x[..., None, :], self.points)
        return np.all(d > 1e-12, axis=-1)

    def max_radius(self, c):
        if len(self.points) == 0:
            return np.full(np.shape(c)[:-1], math.pi)
        return np.min(_angle(np.asarray(c)[..., None, :], self.points), axis=-1)

    def hyperbolic(self) -> bool:
        return len(self.points) >= 2

    def rotated(self, Q):
        return PointComplement(self.points @ np.asarray(Q).T, self.dim)


@dataclass
class Intersection(SphericalDomain):
    parts: list

    @property
    def n(self) -> int:
        return self.parts[0].n

    def contains(self, x):
        return np.logical_and.reduce([p.contains(x) for p in self.parts])

    def max_radius(self, c):
        return np.min([p.max_radius(c) for p in self.parts], axis=0)

    def balls(self):
        return [b for p in self.parts for b in p.balls()]

    def enclosing(self):
        return [b for p in self.parts for b in p.enclosing()]

    def hyperbolic(self) -> bool:
        return any(p.hyperbolic() for p in self.parts)

    def rotated(self, Q):
        return Intersection([p.rotated(Q) for p in self.parts])


@dataclass
class Union(SphericalDomain):
    """Union of parts; a cap counts as inscribed only if it fits in one part."""

    parts: list

    @property
    def n(self) -> int:
        return self.parts[0].n

    def contains(self, x):
        return np.logical_or.reduce([p.contains(x) for p in self.parts])

    def max_radius(self, c):
        return np.max([p.max_radius(c) for p in self.parts], axis=0)

    def balls(self):
        return [b for p in self.parts for b in p.balls()]

    def hyperbolic(self) -> bool:
        if not all(p.hyperbolic() for p in self.parts):
            return False
        if all(isinstance(p, PointComplement) for p in self.parts):
            common = self.parts[0].points
            for p in self.parts[1:]:
                keep = [any(np.allclose(a, b) for b in p.points) for a in common]
                common = common[np.asarray(keep, dtype=bool)] if len(common) else common
            return len(common) >= 2
        # probe the sphere; two uncovered probes certify a large enough complement
        probes = np.random.default_rng(0).standard_normal((UNION_PROBES, self.n + 1))
        probes /= np.linalg.norm(probes, axis=1, keepdims=True)
        return int(np.count_nonzero(~self.contains(probes))) >= 2

    def rotated(self, Q):
        return Union([p.rotated(Q) for p in self.parts])


# ---------------------------------------------------------------- sampler


@dataclass(frozen=True)
class KPSampler:
    """Candidate family: leaf balls, random centres, and a tangent fan of centres through q.

    Each family is a prefix of one fixed sequence, so raising a budget only
    adds candidates. ``refine`` polishes the best sampled centre locally.
    """

    random: int = 256
    directions: int = 16
    steps: int = 32
    seed: int = 0
    refine: bool = True


@dataclass
class KPResult:
    tensor: np.ndarray
    factor: float
    round_factor: float
    ball: RoundBall
    bracket: tuple
    candidates: int


def _tangent_frame(x: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the tangent space of S^n at x, shape (n, n+1)."""
    m = x.size
    Q, _ = np.linalg.qr(np.column_stack([x, np.eye(m)]))
    return Q[:, 1:m].T


def _van_der_corput(count: int) -> np.ndarray:
    """First ``count`` points of the base-2 radical-inverse sequence in (0, 1)."""
    out = np.empty(count)
    for k in range(count):
        i, f, x = k + 1, 0.5, 0.0
        while i:
            x += f * (i & 1)
            i >>= 1
            f *= 0.5
        out[k] = x
    return out


def candidate_centres(D: SphericalDomain, x: np.ndarray, sampler: KPSampler) -> np.ndarray:
    n = D.n
    rand_rng, dir_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(sampler.seed).spawn(2))
    rand = rand_rng.standard_normal((sampler.random, n + 1))
    rand /= np.linalg.norm(rand, axis=1, keepdims=True)
    frame = _tangent_frame(x)
    if n == 1:
        dirs = np.vstack([frame, -frame])
    else:
        dirs = dir_rng.standard_normal((sampler.directions, n)) @ frame
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    t = math.pi * _van_der_corput(sampler.steps)
    fan = np.cos(t)[None, :, None] * x + np.sin(t)[None, :, None] * dirs[:, None, :]
    return np.vstack([x[None, :], rand, fan.reshape(-1, n + 1)])


def _inscribed(D: SphericalDomain, c: np.ndarray, x: np.ndarray) -> RoundBall | None:
    """Largest cap centred at c inside D, if it contains x."""
    a = min(float(D.max_radius(c)), math.pi - 1e-9)
    if a > float(_angle(c, x)) + 1e-9:
        return RoundBall(c, a)
    return None


def _refine(D: SphericalDomain, x: np.ndarray, y: np.ndarray, best: RoundBall, f0: float) -> tuple[RoundBall, float]:
    """Nelder-Mead over the centre, in geodesic normal coordinates at the best centre."""
    c0 = best.center
    frame = _tangent_frame(c0)

    def centre(v):
        s = float(np.linalg.norm(v))
        if s == 0.0:
            return c0
        return math.cos(s) * c0 + math.sin(s) * (v @ frame) / s

    def objective(v):
        B = _inscribed(D, centre(v), x)
        return _conformal_factor(ball_metric(B, y)) if B is not None else 2.0 * f0

    step = 0.1 * best.radius
    simplex = np.vstack([np.zeros(D.n), step * np.eye(D.n)])
    res = minimize(
        objective,
        np.zeros(D.n),
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 1e-9, "fatol": 1e-12 * f0, "maxiter": 400 * D.n},
    )
    B = _inscribed(D, centre(res.x), x)
    if B is None or res.fun >= f0 * (1.0 - REFINE_GAIN):
        return best, f0
    return B, float(res.fun)


def kp_metric(D: SphericalDomain, y, sampler: KPSampler = KPSampler()) -> KPResult:
    """Smallest ball metric at y over the sampled inscribed balls through y.

    The bracket's upper end is the returned factor; its lower end is the
    largest factor among balls known to enclose the domain (0 if none).
    """
    D.check()
    y = np.asarray(y, dtype=float)
    x = from_chart(y)
    if not bool(D.contains(x)):
        raise DomainError("point is not in the domain")

    cands: list[RoundBall] = []
    for b in D.balls():
        if b.contains(x) and D.max_radius(b.center) >= b.radius - 1e-12:
            cands.append(b)
    centres = candidate_centres(D, x, sampler)
    radii = np.minimum(D.max_radius(centres), math.pi - 1e-9)
    inside = radii > _angle(centres, x) + 1e-9
    for c, a in zip(centres[inside], radii[inside]):
        cands.append(RoundBall(c, float(a)))
    if not cands:
        raise DomainError("no inscribed ball through the point was found")

    best_b, best_f = None, math.inf
    for b in cands:
        f = _conformal_factor(ball_metric(b, y))
        if f < best_f:
            best_b, best_f = b, f
    if sampler.refine:
        best_b, best_f = _refine(D, x, y, best_b, best_f)
    best_g = ball_metric(best_b, y)
    lower = 0.0
    for b in D.enclosing():
        if b.contains(x):
            lower = max(lower, _conformal_factor(ball_metric(b, y)))
    return KPResult(
        tensor=best_g,
        factor=best_f,
        round_factor=best_f / round_factor(y),
        ball=best_b,
        bracket=(min(lower, best_f), best_f),
        candidates=len(cands),
    )


def domain_from_json(spec: dict) -> SphericalDomain:
    """Build a domain from {"ball": {"chart_center", "chart_radius"} | {"center", "radius"}},
    {"intersection": [...]}, {"union": [...]} or {"points": [[...], ...], "n": n}."""
    if not isinstance(spec, dict) or len(spec) == 0:
        raise DomainError("domain description must be a non-empty JSON object")
    if "ball" in spec:
        b = spec["ball"]
        if "chart_center" in b:
            return Ball(RoundBall.from_chart(b["chart_center"], float(b["chart_radius"])))
        return Ball(RoundBall(np.asarray(b["center"], dtype=float), float(b["radius"])))
    if "intersection" in spec:
        return Intersection([domain_from_json(s) for s in spec["intersection"]])
    if "union" in spec:
        return Union([domain_from_json(s) for s in spec["union"]])
    if "points" in spec:
        n = int(spec.get("n", 0))
        return PointComplement(np.asarray(spec["points"], dtype=float), n)
    raise DomainError(f"unknown domain keys {sorted(spec)}")
