from __future__ import annotations

import math

import numpy as np
import pytest

from slc_lab import barriers
from slc_lab.errors import ConfigurationError, PreconditionError
from slc_lab.graphsolve import GraphField, PolarGrid, RadialGrid, SolverConfig, newton_solve, perron_solve
from slc_lab.graphsolve.perron import is_supersolution, perron_start, windows
from slc_lab.symcurv import AngleParams

THETA = 3 * math.pi / 4
P = AngleParams(THETA, 2)
R = 3.0
GRID = RadialGrid(2, 1 / 16, 16)
CFG = SolverConfig(THETA, R, n=2)


def test_windows_cover_range():
    for count in (1, 5, 16, 33, 64):
        covered = np.zeros(count, dtype=bool)
        for w in windows(count, 8, 4):
            covered[w] = True
        assert covered.all()
    with pytest.raises(ConfigurationError):
        windows(10, 4, 5)


def test_equidistant_above_leaf_is_supersolution():
    D = barriers.dist_upper(P, R)
    assert is_supersolution(GRID, np.full(GRID.size, 1.2 * D), CFG)
    assert not is_supersolution(GRID, np.full(GRID.size, 0.8 * D), CFG)


def test_rejects_subsolution_start():
    D = barriers.dist_upper(P, R)
    with pytest.raises(PreconditionError, match="not a supersolution"):
        perron_solve(GraphField.constant(GRID, 0.8 * D), CFG)


def test_rejects_polar_grid():
    g = PolarGrid(1 / 8, 8, 16)
    with pytest.raises(ConfigurationError):
        perron_solve(GraphField.constant(g, 1.5), CFG)


def test_fixed_point_stays():
    D = barriers.dist_upper(P, R)
    G, rep = perron_solve(GraphField.constant(GRID, D), CFG)
    assert rep.sweeps == 0
    assert np.max(np.abs(G.u - D)) == 0.0


def test_min_of_two_supersolutions_is_supersolution():
    D = barriers.dist_upper(P, R)
    s = (GRID.rho / GRID.radius) ** 2
    a = np.full(GRID.size, 1.3 * D)
    b = 1.3 * D + 0.2 * (1 - s)
    assert is_supersolution(GRID, a, CFG) and is_supersolution(GRID, b, CFG)
    assert is_supersolution(GRID, np.minimum(a, b), CFG)


def test_monotone_and_matches_newton():
    start = GraphField.constant(GRID, 1.1 * barriers.dist_upper(P, R))
    G, rep = perron_solve(start, CFG)
    assert rep.converged and rep.monotone
    assert np.all(G.u <= start.u)
    Gn, _ = newton_solve(start, CFG)
    assert np.max(np.abs(G.u - Gn.u)) < 1e-8


def test_dome_start_for_low_boundary():
    level = 0.7
    G0 = perron_start(GRID, CFG, level)
    assert G0.u[GRID.boundary][0] == level
    G, rep = perron_solve(G0, CFG, width=8, stride=4)
    assert rep.converged and rep.monotone
    Gn, _ = newton_solve(G0, CFG)
    assert np.max(np.abs(G.u - Gn.u)) < 1e-8
