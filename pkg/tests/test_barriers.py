from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slc_lab import barriers
from slc_lab.errors import DomainError
from slc_lab.symcurv import AngleParams

P = AngleParams(3 * math.pi / 4, 2)


def test_reference_values():
    assert barriers.dist_upper(P, 3.0) == pytest.approx(1.1119138167, abs=1e-9)
    assert barriers.delta_lower(P, 3.0) == pytest.approx(0.48648, abs=1e-5)
    assert barriers.coverage_depth(P, 3.0) == pytest.approx(0.34657, abs=1e-5)
    assert barriers.kappa(P, 1.0) == pytest.approx(2.4781553885, abs=1e-9)


def test_below_threshold_message():
    with pytest.raises(DomainError, match="below threshold"):
        barriers.dist_upper(P, 0.9 * P.threshold)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 5), frac=st.floats(0.02, 0.98), scale=st.floats(1.01, 50.0))
def test_bounds_ordered(n, frac, scale):
    p = AngleParams((n - 1 + frac) * math.pi / 2, n)
    rep = barriers.bound_report(p, p.threshold * scale)
    assert rep.consistent()
    assert rep.coverage_depth <= rep.delta_lower + 1e-10 <= rep.dist_upper + 2e-10


def test_kappa_decreasing_and_inverse():
    ds = np.linspace(0.1, 3.0, 20)
    ks = [barriers.kappa(P, float(d)) for d in ds]
    assert np.all(np.diff(ks) < 0)
    for d, k in zip(ds, ks):
        assert barriers.delta_lower(P, k) == pytest.approx(d, abs=1e-9)


def test_kappa_small_distance_grows():
    # the tube curvature coth(d) dominates: kappa grows like 1/d
    assert 50.0 < barriers.kappa(P, 0.01) < 200.0


def test_coverage_limit_bounded():
    n = 2
    depth = barriers.coverage_depth(AngleParams(math.pi - 1e-6, n), math.tan((math.pi - 1e-6) / 2))
    assert depth < barriers.coverage_limit(n) + 1e-10
    assert depth == pytest.approx(math.atanh(0.5), abs=1e-5)


def test_model_surface_validation():
    with pytest.raises(DomainError):
        barriers.ModelSurface("cone", 2, 1.0)
    with pytest.raises(DomainError):
        barriers.ModelSurface.tube(-1.0, 2)
    assert barriers.shape_of(barriers.ModelSurface.horosphere(3)).values == (1.0, 1.0, 1.0)


def test_equidistant_level_curvature_matches_dist_upper():
    r = 5.0
    d = barriers.dist_upper(P, r)
    assert barriers.level_curvature(P, d) == pytest.approx(r, rel=1e-12)
