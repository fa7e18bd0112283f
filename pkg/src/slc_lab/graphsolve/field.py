"""Graph fields, solver configuration and solve reports."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..errors import ConfigurationError, DomainError
from ..symcurv import AngleParams
from .grids import FuchsianGrid, Grid, PolarGrid, RadialGrid, grid_from_spec

MODES = (FuchsianGrid.mode, RadialGrid.mode, PolarGrid.mode)


@dataclass(frozen=True)
class GraphField:
    """Heights u >= 0 over a base grid; boundary nodes hold Dirichlet data."""

    grid: Grid
    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float).reshape(-1)
        if u.size != self.grid.size:
            raise ConfigurationError(f"expected {self.grid.size} heights, got {u.size}")
        if not np.all(np.isfinite(u)):
            raise DomainError("heights must be finite")
        if np.any(u < 0):
            raise DomainError(f"heights must be >= 0 (min {u.min():.6g})")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def mode(self) -> str:
        return self.grid.mode

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def boundary_values(self) -> np.ndarray:
        return self.u[self.grid.boundary]

    def with_heights(self, u) -> "GraphField":
        return GraphField(self.grid, u)

    @classmethod
    def constant(cls, grid: Grid, d: float) -> "GraphField":
        return cls(grid, np.full(grid.size, float(d)))

    def to_json(self) -> dict:
        return {"mode": self.mode, "grid": self.grid.spec(), "heights": self.u.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "GraphField":
        return cls(grid_from_spec(data["grid"]), np.asarray(data["heights"], dtype=float))


@dataclass(frozen=True)
class SolverConfig:
    theta: float
    target_r: float
    n: int = 2
    newton_tol: float = 1e-9
    max_iter: int = 50
    damping: float = 1.0
    max_halvings: int = 8
    jacobian: str = "exact"
    h: float = 1.0 / 64
    rings: int = 64
    angles: int = 64
    exploratory: bool = False

    def __post_init__(self):
        p = AngleParams(self.theta, self.n)
        if not 0 < self.damping <= 1:
            raise ConfigurationError(f"damping must lie in (0, 1], got {self.damping!r}")
        if self.newton_tol <= 0 or self.max_iter < 1 or self.max_halvings < 0:
            raise ConfigurationError("newton_tol > 0, max_iter >= 1, max_halvings >= 0 required")
        if self.jacobian not in ("exact", "fd", "operator"):
            raise ConfigurationError(f"jacobian must be 'exact', 'fd' or 'operator', got {self.jacobian!r}")
        if not self.target_r > 0 or not math.isfinite(self.target_r):
            raise DomainError(f"target_r must be positive, got {self.target_r!r}")
        if not self.exploratory and not self.target_r > p.threshold:
            raise DomainError(
                f"target r={self.target_r!r} below threshold tan(theta/n)={p.threshold:.12g}"
            )

    @property
    def params(self) -> AngleParams:
        return AngleParams(self.theta, self.n)

    def replace(self, **kw) -> "SolverConfig":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class SolveReport:
    converged: bool
    residuals: list = field(default_factory=list)
    iterations: int = 0
    min_height: float = math.nan
    max_height: float = math.nan
    min_curvature: float = math.nan
    halvings: int = 0
    barrier_flags: dict = field(default_factory=dict)
    message: str = ""
    monotone: bool | None = None
    sweeps: int = 0

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else math.inf

    def to_json(self) -> dict:
        out = asdict(self)
        out["final_residual"] = self.final_residual
        return out
