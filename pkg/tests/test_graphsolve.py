from __future__ import annotations

import math

import numpy as np
import pytest

from slc_lab import barriers
from slc_lab.errors import ConfigurationError, ConvergenceError, DomainError
from slc_lab.foliation import initial_guess
from slc_lab.graphsolve import (
    FuchsianGrid,
    GraphField,
    PolarGrid,
    RadialGrid,
    SolverConfig,
    curvature_field,
    grid_from_spec,
    newton_solve,
    principal_curvatures,
    zeroth_order_field,
)
from slc_lab.graphsolve.newton import Residual
from slc_lab.symcurv import AngleParams

THETA = 3 * math.pi / 4
P = AngleParams(THETA, 2)


def test_solver_config_rejects_below_threshold():
    with pytest.raises(DomainError, match="below threshold"):
        SolverConfig(THETA, 0.5 * P.threshold)
    with pytest.raises(ConfigurationError):
        SolverConfig(THETA, 3.0, jacobian="magic")
    with pytest.raises(ConfigurationError):
        SolverConfig(THETA, 3.0, damping=0.0)


def test_graph_field_validation_and_json():
    g = RadialGrid(2, 1 / 16, 16)
    with pytest.raises(ConfigurationError):
        GraphField(g, np.zeros(3))
    with pytest.raises(DomainError):
        GraphField(g, -np.ones(g.size))
    G = GraphField.constant(g, 0.5)
    back = GraphField.from_json(G.to_json())
    assert np.array_equal(back.u, G.u) and back.mode == "RotSymProfile"


@pytest.mark.parametrize(
    "grid",
    [FuchsianGrid(3), RadialGrid(3, 1 / 16, 16), PolarGrid(1 / 16, 16, 16)],
    ids=["fuchsian", "radial", "polar"],
)
def test_equidistant_is_umbilic(grid):
    d = 0.7
    vals = principal_curvatures(GraphField.constant(grid, d))
    assert np.allclose(vals, math.tanh(d), atol=1e-9)
    assert grid_from_spec(grid.spec()).size == grid.size


@pytest.mark.parametrize("n", [2, 3, 4])
def test_fuchsian_newton_exact(n):
    p = AngleParams((n - 0.5) * math.pi / 2, n)
    r = 2.0 * p.threshold
    G, rep = newton_solve(GraphField.constant(FuchsianGrid(n), 1.0), SolverConfig(p.theta, r, n=n))
    assert rep.converged
    assert G.u[0] == pytest.approx(barriers.dist_upper(p, r), abs=1e-10)


def test_radial_constant_boundary_exact():
    r = 3.0
    g = RadialGrid(2, 1 / 32, 32)
    level = barriers.dist_upper(P, r)
    u0 = np.where(g.interior, level + 0.05 * (1 - (g.rho / g.radius) ** 2), level)
    G, rep = newton_solve(GraphField(g, u0), SolverConfig(THETA, r))
    assert np.max(np.abs(G.u - level)) < 1e-9
    assert rep.iterations <= 10


@pytest.mark.parametrize("kind", ["exact", "fd", "operator"])
def test_jacobians_solve_the_same_problem(kind):
    r = 3.0
    g = RadialGrid(2, 1 / 16, 16)
    b = np.full(g.size, 0.8)
    u0 = np.where(g.interior, initial_guess(g, b, P, r), b)
    cfg = SolverConfig(THETA, r, jacobian=kind, max_iter=200)
    G, rep = newton_solve(GraphField(g, u0), cfg)
    ref, _ = newton_solve(GraphField(g, u0), cfg.replace(jacobian="exact"))
    assert np.max(np.abs(G.u - ref.u)) < 1e-8


def test_exact_jacobian_matches_finite_differences():
    r = 3.0
    g = PolarGrid(1 / 8, 8, 16)
    s = (g.rho / g.radius) ** 2
    u = 0.6 + 0.1 * (1 - s) + 0.03 * s * np.cos(2 * g.phi)
    res = Residual(g, THETA, r, g.interior)
    J = res.jacobian(u, "exact")
    dv = np.where(g.interior, (1 - s) * (1 + 0.5 * g.rho * np.cos(g.phi) + 0.2 * np.sin(3 * g.phi)), 0.0)
    v = dv[res.free]
    # the difference quotient carries an O(eps^2) error with a large constant
    eps = 1e-7
    fd = (res(u + eps * dv) - res(u - eps * dv)) / (2 * eps)
    assert np.max(np.abs(J @ v - fd)) < 1e-5 * np.max(np.abs(fd))


def test_disk_uniqueness_from_two_starts():
    r = 3.0
    g = PolarGrid(1 / 16, 16, 16)
    b = 0.8 * (1 + 0.05 * np.cos(2 * g.phi))
    cfg = SolverConfig(THETA, r)
    u_a = np.where(g.interior, initial_guess(g, b, P, r), b)
    u_b = np.where(g.interior, u_a + 0.05 * (1 - (g.rho / g.radius) ** 2), b)
    Ga, _ = newton_solve(GraphField(g, u_a), cfg)
    Gb, _ = newton_solve(GraphField(g, u_b), cfg)
    assert np.max(np.abs(Ga.u - Gb.u)) < 1e-10
    R = curvature_field(Ga, P)
    assert np.nanmax(np.abs(R - r)) < 1e-8


def test_zeroth_order_field_nonnegative_on_solution():
    r = 3.0
    g = PolarGrid(1 / 16, 16, 16)
    b = 0.8 * (1 + 0.05 * np.cos(2 * g.phi))
    G, _ = newton_solve(GraphField(g, np.where(g.interior, initial_guess(g, b, P, r), b)), SolverConfig(THETA, r))
    z = zeroth_order_field(G, P, r)
    assert np.nanmin(z) >= -1e-10


def test_non_convergence_raises():
    g = RadialGrid(2, 1 / 16, 16)
    b = np.full(g.size, 0.8)
    u0 = np.where(g.interior, initial_guess(g, b, P, 3.0), b)
    with pytest.raises(ConvergenceError):
        newton_solve(GraphField(g, u0), SolverConfig(THETA, 3.0, max_iter=1, newton_tol=1e-14))
