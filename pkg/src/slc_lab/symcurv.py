"""Symmetric shape operators and the special Lagrangian curvature functions.

For a symmetric matrix A with eigenvalues lambda_i,

    arctan(A)  = sum_i arctan(lambda_i)
    SL_r(A)    = arctan(r A)
    R_theta(A) = the unique r > 0 with SL_r(A) = theta   (A positive definite)

The batched kernels in :mod:`slc_lab.kernels` do the numerical work; this
module wraps them in validated value types and adds the scalar inequalities
used elsewhere as checks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from . import kernels
from .errors import ConfigurationError, DomainError, NotStrictlyConvexError, PreconditionError

COMPARE_TOL = 1e-10
SOLVE_TOL = 1e-12
TOLERANCES = MappingProxyType({"compare": COMPARE_TOL, "solve": SOLVE_TOL})

N_MIN, N_MAX = 2, 8


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric n x n matrix, 2 <= n <= 8.

    The input is symmetrized as (M + M^T)/2 on construction, so the stored
    entries are exactly symmetric.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConfigurationError(f"expected a square matrix, got shape {m.shape}")
        n = m.shape[0]
        if not N_MIN <= n <= N_MAX:
            raise ConfigurationError(f"dimension {n} outside supported range [{N_MIN}, {N_MAX}]")
        if not np.all(np.isfinite(m)):
            raise ConfigurationError("matrix has non-finite entries")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def diag(cls, values) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls(np.eye(n))

    def scaled(self, s: float) -> "SymMatrix":
        return SymMatrix(s * self.entries)

    def conjugated(self, q) -> "SymMatrix":
        q = np.asarray(q, dtype=float)
        return SymMatrix(q @ self.entries @ q.T)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        return SymMatrix(self.entries - other.entries)

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        return SymMatrix(self.entries + other.entries)


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues, optionally with the orthogonal eigenbasis."""

    values: tuple
    vectors: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(b < a for a, b in zip(vals, vals[1:])):
            vals = tuple(sorted(vals))
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def positive_definite(self) -> bool:
        return self.values[0] > 0.0

    def as_array(self) -> np.ndarray:
        return np.array(self.values)


@dataclass(frozen=True)
class AngleParams:
    theta: float
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ConfigurationError(f"dimension must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "theta", float(self.theta))
        if not 0.0 < self.theta < self.n * math.pi / 2:
            raise DomainError(
                f"theta={self.theta!r} outside (0, n*pi/2) = (0, {self.n * math.pi / 2:.12g})"
            )

    @property
    def hyperbolic(self) -> bool:
        """True in the regime theta >= (n-1)*pi/2."""
        return self.theta >= (self.n - 1) * math.pi / 2

    @property
    def threshold(self) -> float:
        """tan(theta/n): R_theta of the identity, and the infimum of admissible leaf curvatures."""
        return math.tan(self.theta / self.n)


def _as_sym(A) -> SymMatrix:
    return A if isinstance(A, SymMatrix) else SymMatrix(A)


def eigen_decomposition(A) -> tuple[np.ndarray, np.ndarray]:
    """Return (values ascending, Q) with A = Q diag(values) Q^T."""
    A = _as_sym(A)
    vals, vecs = kernels.jacobi_eigh(A.entries[None])
    return vals[0], vecs[0]


def eigenvalues(A) -> Spectrum:
    vals, vecs = eigen_decomposition(A)
    vecs.setflags(write=False)
    return Spectrum(tuple(vals), vecs)


def _values(A) -> np.ndarray:
    if isinstance(A, Spectrum):
        return A.as_array()
    return eigen_decomposition(A)[0]


def arctan_matrix(A) -> float:
    """Sum of arctan over the eigenvalues; lies in (-n pi/2, n pi/2)."""
    return float(np.sum(np.arctan(_values(A))))


def arctan_via_determinant(A, steps: int = 512) -> float:
    """Independent evaluation of arctan(A) as a continuous argument of det(I + iA).

    The argument of det(I + i t A) is followed from t = 0 (where it is 0) to
    t = 1 without using eigenvalues, unwrapping each increment. Supported for
    n <= 4 only; it serves as a cross-check.
    """
    A = _as_sym(A)
    if A.n > 4:
        raise ConfigurationError("determinant cross-check is limited to n <= 4")
    eye = np.eye(A.n)
    total = 0.0
    prev = 1.0 + 0.0j
    for t in np.linspace(0.0, 1.0, steps + 1)[1:]:
        cur = np.linalg.det(eye + 1j * t * A.entries)
        total += np.angle(cur / prev)
        prev = cur
    return float(total)


def _check_r(r: float) -> float:
    r = float(r)
    if not r > 0.0 or not math.isfinite(r):
        raise DomainError(f"r must be a positive finite number, got {r!r}")
    return r


def sl_r(A, r: float) -> float:
    r = _check_r(r)
    return float(np.sum(np.arctan(r * _values(A))))


def r_theta(A, p: AngleParams) -> float:
    """Special Lagrangian curvature R_theta(A)."""
    vals = _values(A)
    if vals.size != p.n:
        raise ConfigurationError(f"matrix dimension {vals.size} does not match AngleParams.n={p.n}")
    if not vals[0] > 0.0:
        raise NotStrictlyConvexError(
            f"shape operator is not positive definite (smallest eigenvalue {vals[0]:.6g})"
        )
    return float(kernels.r_theta(vals[None], p.theta)[0])


def zeroth_coeff(A, r: float) -> float:
    """Tr((I - A^2)(I + r^2 A^2)^-1), evaluated in the eigenbasis."""
    r = _check_r(r)
    lam = _values(A)
    return float(np.sum((1.0 - lam * lam) / (1.0 + r * r * lam * lam)))


@dataclass(frozen=True)
class MinSearch:
    """Search budget for :func:`min_zeroth_coeff`."""

    grid_points: int = 2001
    restarts: int = 24
    descent_steps: int = 400
    seed: int = 0


def _phi_angles(phi: np.ndarray, r: float) -> np.ndarray:
    # (1 - x^2)/(1 + r^2 x^2) with x = tan(phi)/r equals (1 + r^-2) cos^2 phi - r^-2
    return np.sum((1.0 + r ** -2) * np.cos(phi) ** 2 - r ** -2, axis=-1)


def _project_box_simplex(y: np.ndarray, total: float, hi: float) -> np.ndarray:
    """Euclidean projection of each row of y onto {sum = total, 0 <= x <= hi}."""
    lo_t = np.min(y, axis=-1, keepdims=True) - hi
    hi_t = np.max(y, axis=-1, keepdims=True)
    for _ in range(70):
        tau = 0.5 * (lo_t + hi_t)
        over = np.sum(np.clip(y - tau, 0.0, hi), axis=-1, keepdims=True) > total
        lo_t = np.where(over, tau, lo_t)
        hi_t = np.where(over, hi_t, tau)
    return np.clip(y - 0.5 * (lo_t + hi_t), 0.0, hi)


def _two_level_candidates(theta: float, n: int, grid: np.ndarray) -> list[np.ndarray]:
    """Angle vectors where each entry is eta, pi/2 - eta, 0, pi/2, or one slack value."""
    half = math.pi / 2
    out = []
    for k, j, b in itertools.product(range(n + 1), repeat=3):
        rest = n - k - j - b
        if rest < 0:
            continue
        # exact stationary family: the remaining `rest` entries are 0
        if k != j:
            eta = (theta - (j + b) * half) / (k - j)
            if 0.0 <= eta <= half:
                out.append(np.array([eta] * k + [half - eta] * j + [half] * b + [0.0] * rest))
        elif k > 0 and abs((k + b) * half - theta) < 1e-15:
            # any eta works here; the objective does not depend on it
            out.append(np.array([0.3] * k + [half - 0.3] * j + [half] * b + [0.0] * rest))
        # dense eta grid with one slack entry absorbing the constraint
        if rest >= 1:
            slack = theta - k * grid - j * (half - grid) - b * half
            ok = (slack >= 0.0) & (slack <= half)
            for eta, s in zip(grid[ok], slack[ok]):
                out.append(np.array([eta] * k + [half - eta] * j + [half] * b + [s] + [0.0] * (rest - 1)))
    return out


def min_zeroth_coeff(p: AngleParams, r: float, search: MinSearch = MinSearch()) -> float:
    """Minimum of sum (1 - x_i^2)/(1 + r^2 x_i^2) over x >= 0 with sum arctan(r x_i) = theta.

    Works in angle coordinates phi_i = arctan(r x_i) in [0, pi/2], where the
    objective is (1 + r^-2) sum cos^2 phi_i - n r^-2 and the constraint is
    linear. Two independent searches are combined: the two-level candidates
    (every coordinate equal to eta or pi/2 - eta, or on the box boundary,
    with a dense eta grid) and projected gradient descent from random starts.
    """
    r = _check_r(r)
    if not p.hyperbolic:
        raise DomainError("min_zeroth_coeff needs theta >= (n-1)*pi/2")
    if r < p.threshold * (1 - 1e-15):
        raise DomainError(f"r={r!r} below threshold tan(theta/n)={p.threshold!r}")
    n, theta, half = p.n, p.theta, math.pi / 2

    grid = np.linspace(0.0, half, search.grid_points)
    cands = _two_level_candidates(theta, n, grid)
    cands.append(np.full(n, theta / n))
    best = float(np.min(_phi_angles(np.array(cands), r)))

    rng = np.random.default_rng(search.seed)
    phi = _project_box_simplex(rng.uniform(0.0, half, (search.restarts, n)), theta, half)
    val = _phi_angles(phi, r)
    step = np.full(search.restarts, 0.25)
    for _ in range(search.descent_steps):
        grad = -(1.0 + r ** -2) * np.sin(2.0 * phi)
        trial = _project_box_simplex(phi - step[:, None] * grad, theta, half)
        tval = _phi_angles(trial, r)
        better = tval <= val
        phi = np.where(better[:, None], trial, phi)
        val = np.where(better, tval, val)
        step = np.where(better, step, 0.5 * step)
    best = min(best, float(np.min(val)))
    return best


def umbilic_zeroth_coeff(p: AngleParams, r: float) -> float:
    """Closed form n r^-2 ((1 + r^2) cos^2(theta/n) - 1) at the umbilic point."""
    r = _check_r(r)
    return p.n * r ** -2 * ((1.0 + r * r) * math.cos(p.theta / p.n) ** 2 - 1.0)


def sin_inequality_margin(n: int, m: int, t: float) -> float:
    """n sin^2(t/n) - m sin^2(t/m); nonnegative for 0 < n < m and t in (0, pi/2]."""
    if int(n) != n or int(m) != m:
        raise DomainError("n and m must be integers")
    if not 0 < n < m:
        raise DomainError(f"need 0 < n < m, got n={n}, m={m}")
    if not 0.0 < t <= math.pi / 2 + 1e-15:
        raise DomainError(f"t={t!r} outside (0, pi/2]")
    return n * math.sin(t / n) ** 2 - m * math.sin(t / m) ** 2


def eigen_monotonicity_check(A, A2) -> bool:
    """Check that A2 <= A in quadratic-form order implies ordered eigenvalues.

    Raises PreconditionError with the offending direction when A - A2 has an
    eigenvalue below -1e-12.
    """
    A, A2 = _as_sym(A), _as_sym(A2)
    dvals, dvecs = eigen_decomposition(A - A2)
    if dvals[0] < -1e-12:
        v = dvecs[:, 0]
        raise PreconditionError(
            "A2 <= A violated along direction "
            + "(" + ", ".join(f"{x:.6g}" for x in v) + ")"
            + f" with v^T (A - A2) v = {dvals[0]:.6g}"
        )
    lam = _values(A)
    lam2 = _values(A2)
    return bool(np.all(lam2 <= lam + COMPARE_TOL))
