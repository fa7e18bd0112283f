from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slc_lab import hypgeom
from slc_lab.errors import DomainError, FlowSingularityError
from slc_lab.hypgeom import HPoint, UnitTangent
from slc_lab.symcurv import Spectrum


def test_hpoint_normalises():
    p = HPoint([2.0, 1.0, 0.0])
    assert hypgeom.mdot(p.v, p.v) == pytest.approx(-1.0)
    with pytest.raises(DomainError):
        HPoint([0.0, 1.0, 0.0])


@settings(max_examples=50, deadline=None)
@given(t=st.floats(0.0, 5.0), seed=st.integers(0, 1000))
def test_geodesic_has_unit_speed(t, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(3)
    base = HPoint(np.concatenate([[math.sqrt(1.0 + x @ x)], x]))
    u = UnitTangent(base, np.concatenate([[0.0], rng.standard_normal(3)]))
    q = hypgeom.exp_point(u, t)
    assert float(hypgeom.distance(base.v, q.v)) == pytest.approx(t, abs=1e-7)
    w = hypgeom.geodesic_velocity(u, t)
    assert hypgeom.mdot(w.dir, w.dir) == pytest.approx(1.0)
    assert hypgeom.mdot(w.dir, q.v) == pytest.approx(0.0, abs=1e-9)


def test_fermi_height_round_trip():
    x = np.array([math.cosh(0.4), math.sinh(0.4), 0.0])
    for u in (0.0, 0.3, 1.7):
        P = hypgeom.fermi_embed(x, u)
        assert hypgeom.height_above_base(P) == pytest.approx(u)
        assert hypgeom.mdot(P, P) == pytest.approx(-1.0)


def test_tube_distance():
    P = hypgeom.tube_embed(0.3, np.array([0.6, 0.8]), 0.9)
    assert hypgeom.distance_to_axis(P) == pytest.approx(0.9)
    with pytest.raises(DomainError):
        hypgeom.tube_embed(0.0, np.array([1.0, 0.0]), 0.0)


def rk4(lam: float, d: float, steps: int = 4000) -> float:
    h = d / steps
    for _ in range(steps):
        k1 = 1 - lam * lam
        k2 = 1 - (lam + 0.5 * h * k1) ** 2
        k3 = 1 - (lam + 0.5 * h * k2) ** 2
        k4 = 1 - (lam + h * k3) ** 2
        lam += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
    return lam


@pytest.mark.parametrize("lam", [0.0, 0.3, 1.0, 2.5, -0.5])
def test_normal_flow_matches_rk4(lam):
    assert hypgeom.normal_flow_eigenvalue(lam, 1.2) == pytest.approx(rk4(lam, 1.2), abs=1e-10)


def test_normal_flow_singularity():
    with pytest.raises(FlowSingularityError):
        hypgeom.normal_flow_eigenvalue(-2.0, 5.0)
    with pytest.raises(DomainError):
        hypgeom.normal_flow_shape(Spectrum((0.5, 0.5)), -1.0)


def test_normal_flow_semigroup():
    s = Spectrum((0.2, 1.5, 3.0))
    a = hypgeom.normal_flow_shape(hypgeom.normal_flow_shape(s, 0.4), 0.7).as_array()
    b = hypgeom.normal_flow_shape(s, 1.1).as_array()
    assert np.allclose(a, b, atol=1e-13)


def test_spherical_cap_sanity():
    """Geodesic sphere of radius rho is umbilic with curvature coth(rho)."""
    for n in (2, 3):
        patch = hypgeom.sphere_patch(0.8, n)
        F = hypgeom.fundamental_forms(patch.func, patch.at, 1e-3, patch.outward)
        assert np.allclose(F.principal_curvatures().as_array(), 1 / math.tanh(0.8), atol=1e-5)
        assert F.self_adjoint_residual() < 1e-8


@pytest.mark.parametrize("maker", ["equidistant", "horosphere", "tube"])
def test_model_patches(maker):
    patch = {
        "equidistant": lambda: hypgeom.equidistant_patch(0.5, 3),
        "horosphere": lambda: hypgeom.horosphere_patch(3),
        "tube": lambda: hypgeom.tube_patch(0.5, 3),
    }[maker]()
    F = hypgeom.fundamental_forms(patch.func, patch.at, 1e-3, patch.outward)
    assert np.allclose(F.principal_curvatures().as_array(), np.sort(patch.exact), atol=1e-5)
