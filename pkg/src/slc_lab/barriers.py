"""Model hypersurfaces with known curvature and the scalar distance bounds built on them.

For a leaf of constant special Lagrangian curvature r over a convex body:

    dist_upper(r)     = artanh(tan(theta/n) / r)          equidistant comparison
    delta_lower(r)    = kappa^-1(r)                       tube comparison
    coverage_depth(r) = artanh(tan(theta - (n-1) pi/2) / r)

where kappa(d) = R_theta of the tube shape operator diag(tanh d, coth d, ...).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import hypgeom, kernels
from .errors import DomainError
from .symcurv import AngleParams, Spectrum

KINDS = ("equidistant", "sphere", "horosphere", "tube")


@dataclass(frozen=True)
class ModelSurface:
    kind: str
    n: int
    param: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown model surface {self.kind!r}; expected one of {KINDS}")
        if self.n < 1:
            raise DomainError("dimension must be >= 1")
        if self.kind == "horosphere":
            if self.param is not None:
                raise DomainError("horosphere takes no parameter")
        elif self.param is None or not self.param > 0:
            raise DomainError(f"{self.kind} needs a positive parameter, got {self.param!r}")

    @classmethod
    def equidistant(cls, d: float, n: int) -> "ModelSurface":
        return cls("equidistant", n, d)

    @classmethod
    def sphere(cls, rho: float, n: int) -> "ModelSurface":
        return cls("sphere", n, rho)

    @classmethod
    def horosphere(cls, n: int) -> "ModelSurface":
        return cls("horosphere", n)

    @classmethod
    def tube(cls, d: float, n: int) -> "ModelSurface":
        return cls("tube", n, d)

    def patch(self) -> hypgeom.Patch:
        """A parametrized piece of the surface, for finite-difference checks."""
        if self.kind == "equidistant":
            return hypgeom.equidistant_patch(self.param, self.n)
        if self.kind == "sphere":
            return hypgeom.sphere_patch(self.param, self.n)
        if self.kind == "horosphere":
            return hypgeom.horosphere_patch(self.n)
        return hypgeom.tube_patch(self.param, self.n)


def shape_of(m: ModelSurface) -> Spectrum:
    n, x = m.n, m.param
    if m.kind == "equidistant":
        return Spectrum((math.tanh(x),) * n)
    if m.kind == "sphere":
        return Spectrum((1.0 / math.tanh(x),) * n)
    if m.kind == "horosphere":
        return Spectrum((1.0,) * n)
    return Spectrum((math.tanh(x),) + (1.0 / math.tanh(x),) * (n - 1))


def _r_of(vals, p: AngleParams) -> float:
    return float(kernels.r_theta(np.asarray(vals, dtype=float)[None], p.theta)[0])


def level_curvature(p: AngleParams, d: float) -> float:
    """R_theta of the equidistant at distance d: tan(theta/n)/tanh(d)."""
    if not d > 0:
        raise DomainError(f"distance must be positive, got {d!r}")
    return p.threshold / math.tanh(d)


def is_degenerate(p: AngleParams) -> bool:
    """theta sits exactly on the regime boundary (n-1) pi/2."""
    return abs(p.theta - (p.n - 1) * math.pi / 2) <= 1e-15 * max(1.0, p.theta)


def kappa(p: AngleParams, d: float) -> float:
    """R_theta of the tube of radius d around a geodesic."""
    if not d > 0:
        raise DomainError(f"distance must be positive, got {d!r}")
    if not p.hyperbolic:
        raise DomainError("kappa is only defined for theta >= (n-1)*pi/2")
    return _r_of(shape_of(ModelSurface.tube(d, p.n)).values, p)


def _tube_gap(d: float, R: float, p: AngleParams) -> float:
    # SL_R of the tube minus theta; increasing through 0 at d = delta(R)
    return math.atan(R * math.tanh(d)) + (p.n - 1) * math.atan(R / math.tanh(d)) - p.theta


def delta_lower(p: AngleParams, R: float) -> float:
    """The tube radius d with kappa(d) = R."""
    if not p.theta > (p.n - 1) * math.pi / 2:
        raise DomainError("delta_lower needs theta > (n-1)*pi/2")
    if not R > p.threshold:
        raise DomainError(f"R={R!r} must exceed tan(theta/n)={p.threshold!r}")
    lo, hi = 1.0, 1.0
    while _tube_gap(lo, R, p) >= 0.0:
        lo *= 0.5
        if lo < 1e-300:
            raise DomainError("could not bracket delta_lower from below")
    while _tube_gap(hi, R, p) <= 0.0:
        hi *= 2.0
        if hi > 64.0:
            raise DomainError("R is too close to tan(theta/n) to resolve delta_lower in double precision")
    return float(brentq(_tube_gap, lo, hi, args=(R, p), xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500))


def dist_upper(p: AngleParams, r: float) -> float:
    if not r > p.threshold:
        raise DomainError(
            f"foliation parameter below threshold: r={r!r} <= tan(theta/n)={p.threshold!r}"
        )
    return math.atanh(p.threshold / r)


def coverage_depth(p: AngleParams, r: float) -> float:
    half = math.pi / 2
    if not p.theta > (p.n - 1) * half:
        raise DomainError("coverage_depth needs theta > (n-1)*pi/2")
    if r < p.threshold * (1.0 - 1e-14):
        raise DomainError(f"r={r!r} below tan(theta/n)={p.threshold!r}")
    arg = math.tan(p.theta - (p.n - 1) * half) / r
    if not arg < 1.0:
        raise DomainError(f"coverage argument {arg!r} >= 1")
    return math.atanh(arg)


def coverage_limit(n: int) -> float:
    """Limit of coverage_depth(theta, tan(theta/n)) as theta -> n pi/2.

    tan(theta - (n-1) pi/2) / tan(theta/n) tends to 1/n, so the depth stays
    bounded by artanh(1/n) instead of growing without bound.
    """
    return math.atanh(1.0 / n) if n > 1 else math.inf


@dataclass(frozen=True)
class BoundReport:
    theta: float
    r: float
    n: int
    dist_upper: float
    delta_lower: float
    coverage_depth: float

    def consistent(self, slack: float = 1e-10) -> bool:
        ok = True
        if math.isfinite(self.delta_lower) and math.isfinite(self.dist_upper):
            ok &= self.delta_lower <= self.dist_upper + slack
        if math.isfinite(self.coverage_depth) and math.isfinite(self.delta_lower):
            ok &= self.coverage_depth <= self.delta_lower + slack
        return bool(ok)

    def as_row(self) -> dict:
        return {
            "theta": self.theta,
            "r": self.r,
            "n": self.n,
            "dist_upper": self.dist_upper,
            "delta_lower": self.delta_lower,
            "coverage_depth": self.coverage_depth,
        }


def bound_report(p: AngleParams, r: float) -> BoundReport:
    """All three distance bounds at (theta, r); NaN where a bound is undefined."""
    up = dist_upper(p, r)
    strict = p.theta > (p.n - 1) * math.pi / 2
    low = delta_lower(p, r) if strict else math.nan
    cov = coverage_depth(p, r) if strict else math.nan
    return BoundReport(p.theta, float(r), p.n, up, low, cov)
