"""Fast self-check suite behind ``slc-lab verify``.

Each check returns a :class:`Check`; the suite is deterministic for a given
seed and finishes in a few seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import barriers, hypgeom, symcurv
from .symcurv import COMPARE_TOL, AngleParams, Spectrum


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def _random_pd(rng, n: int) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.exp(rng.uniform(-2.0, 2.0, n))
    return (q * lam) @ q.T


def check_umbilic(rng) -> Check:
    worst = 0.0
    for n in range(2, 6):
        for lam in np.geomspace(0.05, 20.0, 9):
            for theta in np.linspace(0.1, n * math.pi / 2 - 0.1, 7):
                r = symcurv.r_theta(symcurv.SymMatrix.identity(n).scaled(lam), AngleParams(theta, n))
                worst = max(worst, abs(r - math.tan(theta / n) / lam) / max(1.0, r))
    return Check("umbilic r_theta closed form", bool(worst <= COMPARE_TOL), f"max rel err {worst:.3e}")


def check_round_trip(rng) -> Check:
    worst = 0.0
    for _ in range(300):
        n = int(rng.integers(2, 6))
        A = _random_pd(rng, n)
        theta = rng.uniform((n - 1) * math.pi / 2, n * math.pi / 2)
        r = symcurv.r_theta(A, AngleParams(theta, n))
        worst = max(worst, abs(symcurv.sl_r(A, r) - theta))
    return Check("sl_r(r_theta) round trip", worst <= COMPARE_TOL, f"max err {worst:.3e}")


def check_sin_inequality(rng) -> Check:
    ts = np.linspace(math.pi / 400, math.pi / 2, 200)
    worst, zeros = math.inf, []
    for n in range(1, 8):
        for m in range(n + 1, 9):
            for t in ts:
                v = symcurv.sin_inequality_margin(n, m, float(t))
                worst = min(worst, v)
                if abs(v) <= 1e-14:
                    zeros.append((n, m, float(t)))
    ok = worst >= -1e-14 and zeros == [(1, 2, math.pi / 2)]
    return Check("n sin^2(t/n) >= m sin^2(t/m)", ok, f"min {worst:.3e}, zeros {zeros}")


def constrained_sample(rng, n: int, theta: float, r: float) -> np.ndarray:
    """Random positive definite A rescaled so that R_theta(A) = r."""
    A = _random_pd(rng, n)
    return A * (symcurv.r_theta(A, AngleParams(theta, n)) / r)


def check_zeroth_coeff(rng) -> Check:
    worst = math.inf
    for _ in range(2000):
        n = int(rng.integers(2, 6))
        theta = rng.uniform((n - 1) * math.pi / 2, n * math.pi / 2)
        r = math.tan(theta / n) * rng.uniform(1.0, 4.0)
        worst = min(worst, symcurv.zeroth_coeff(constrained_sample(rng, n, theta, r), r))
    return Check("zeroth-order coefficient >= 0", worst >= -COMPARE_TOL, f"min {worst:.3e}")


def check_zeroth_threshold(rng) -> Check:
    vals = []
    for n in (2, 3, 4):
        p = AngleParams((n - 0.5) * math.pi / 2, n)
        vals.append(symcurv.min_zeroth_coeff(p, p.threshold))
    worst = max(abs(v) for v in vals)
    return Check("min zeroth coefficient vanishes at threshold", worst <= 1e-8, f"values {vals}")


def _rk4(lam: float, d: float, steps: int = 2000) -> float:
    h = d / steps
    f = lambda x: 1.0 - x * x  # noqa: E731
    for _ in range(steps):
        k1 = f(lam)
        k2 = f(lam + 0.5 * h * k1)
        k3 = f(lam + 0.5 * h * k2)
        k4 = f(lam + h * k3)
        lam += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
    return lam


def check_riccati(rng) -> Check:
    worst = 0.0
    for _ in range(100):
        lam = rng.uniform(0.05, 4.0, 3)
        d = rng.uniform(0.0, 2.0)
        got = hypgeom.normal_flow_shape(Spectrum(tuple(lam)), d).as_array()
        ref = np.sort([_rk4(float(v), d) for v in lam])
        worst = max(worst, float(np.max(np.abs(got - ref))))
    return Check("Riccati flow closed form vs RK4", worst <= 1e-8, f"max err {worst:.3e}")


def check_bounds(rng) -> Check:
    bad = 0
    total = 0
    for n in range(2, 6):
        for theta in np.linspace((n - 1) * math.pi / 2 + 0.02, n * math.pi / 2 - 0.02, 12):
            p = AngleParams(float(theta), n)
            for s in (1.05, 1.5, 3.0, 10.0):
                total += 1
                if not barriers.bound_report(p, p.threshold * s).consistent():
                    bad += 1
    return Check("coverage <= delta <= dist_upper", bad == 0, f"{bad}/{total} inconsistent")


def check_kappa_round_trip(rng) -> Check:
    worst = 0.0
    p = AngleParams(3 * math.pi / 4, 2)
    for d in np.linspace(0.2, 3.0, 15):
        worst = max(worst, abs(barriers.delta_lower(p, barriers.kappa(p, float(d))) - d))
    return Check("delta_lower inverts kappa", bool(worst <= 1e-9), f"max err {worst:.3e}")


def check_coverage_limit(rng) -> Check:
    """Along r = tan(theta/n) the depth increases toward artanh(1/n) and stays below it."""
    n = 2
    thetas = np.linspace(math.pi / 2 + 1e-3, math.pi - 1e-6, 200)
    depth = np.array([barriers.coverage_depth(AngleParams(float(t), n), math.tan(t / n)) for t in thetas])
    lim = barriers.coverage_limit(n)
    # tan near pi/2 loses ~1e-11 absolutely, hence the comparison slack on the limit
    ok = bool(np.all(np.diff(depth) > 0) and depth[-1] <= lim + COMPARE_TOL and lim - depth[-1] < 1e-5)
    return Check("coverage depth tends to artanh(1/n)", ok, f"last {depth[-1]:.9f}, limit {lim:.9f}")


def check_fuchsian(rng) -> Check:
    from .foliation import fuchsian_certificate

    worst = 0.0
    for _ in range(10):
        n = int(rng.integers(2, 5))
        theta = rng.uniform((n - 1) * math.pi / 2 + 0.05, n * math.pi / 2 - 0.05)
        p = AngleParams(theta, n)
        worst = max(worst, fuchsian_certificate(p, p.threshold * rng.uniform(1.1, 5.0)))
    return Check("Fuchsian Newton solve matches closed form", worst <= 1e-9, f"max err {worst:.3e}")


CHECKS: tuple[Callable, ...] = (
    check_umbilic,
    check_round_trip,
    check_sin_inequality,
    check_zeroth_coeff,
    check_zeroth_threshold,
    check_riccati,
    check_bounds,
    check_kappa_round_trip,
    check_coverage_limit,
    check_fuchsian,
)


def run_all(seed: int = 0) -> list[Check]:
    out = []
    for fn in CHECKS:
        out.append(fn(np.random.default_rng(seed)))
    return out
