from __future__ import annotations

import math

import numpy as np
import pytest

from slc_lab import barriers
from slc_lab.errors import DomainError
from slc_lab.foliation import default_schedule, fuchsian_certificate, sweep, theta_sweep
from slc_lab.graphsolve import FuchsianGrid, PolarGrid, RadialGrid, SolverConfig
from slc_lab.symcurv import AngleParams

THETA = 3 * math.pi / 4
P = AngleParams(THETA, 2)


def test_fuchsian_sweep_exact():
    cfg = SolverConfig(THETA, 10.0, n=2)
    rs = [30.0, 10.0, 5.0, 3.0, 2.5]
    S = sweep(cfg, rs, grid=FuchsianGrid(2))
    assert not S.truncated
    for rec, r in zip(S.records, rs):
        assert rec.field.u[0] == pytest.approx(barriers.dist_upper(P, r), abs=1e-10)
    assert fuchsian_certificate(P, 4.0) < 1e-10


def test_warm_start_iterations_small_steps():
    g = RadialGrid(2, 1 / 32, 32)
    cfg = SolverConfig(THETA, 3.0, n=2)
    rs = [6.0 * 0.9**k for k in range(6)]
    S = sweep(cfg, rs, grid=g)
    assert not S.truncated
    assert all(rec.iterations <= 5 for rec in S.records[1:])


def test_leaves_ordered_on_disk():
    g = PolarGrid(1 / 16, 16, 16)
    S = sweep(SolverConfig(THETA, 3.0, n=2), [50.0, 10.0, 4.0, 3.0], grid=g)
    assert np.all(S.gaps() > 0)
    assert all(not rec.degraded for rec in S.records)
    assert S.heights().shape == (4, g.size)


def test_sweep_rejects_below_threshold():
    with pytest.raises(DomainError, match="below threshold"):
        sweep(SolverConfig(THETA, 3.0), [3.0, 0.9 * P.threshold], grid=FuchsianGrid(2))


def test_default_schedule_descends_above_threshold():
    rs = default_schedule(P)
    assert len(rs) == 6 and np.all(np.diff(rs) < 0) and min(rs) > P.threshold


def test_theta_sweep_depth_increases_to_limit():
    T = theta_sweep(np.linspace(math.pi / 2 + 0.01, math.pi - 1e-4, 30))
    assert T.monotone
    assert T.depths()[-1] < barriers.coverage_limit(2) + 1e-10
