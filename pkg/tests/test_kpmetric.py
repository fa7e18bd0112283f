from __future__ import annotations

import math

import numpy as np
import pytest

from slc_lab import kpmetric
from slc_lab.errors import DomainError, NotHyperbolicTypeError
from slc_lab.kpmetric import Ball, Intersection, KPSampler, PointComplement, RoundBall, Union

SMALL = KPSampler(random=64, directions=8, steps=16)


def rotation(seed: int, m: int) -> np.ndarray:
    q, r = np.linalg.qr(np.random.default_rng(seed).standard_normal((m, m)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def test_chart_round_trip():
    y = np.array([[0.3, -1.2], [2.0, 0.1]])
    assert np.allclose(kpmetric.to_chart(kpmetric.from_chart(y)), y)
    with pytest.raises(DomainError):
        kpmetric.to_chart(np.array([0.0, 0.0, 1.0]))


def test_round_ball_from_chart_rim():
    B = RoundBall.from_chart(np.array([0.2, 0.1]), 0.5)
    rim = kpmetric.from_chart(np.array([0.7, 0.1]))
    assert kpmetric._angle(rim, B.center) == pytest.approx(B.radius, abs=1e-12)


@pytest.mark.parametrize("q", [[0.0, 0.0], [0.5, -0.2], [0.1, 0.85]])
def test_unit_chart_ball_is_poincare(q):
    D = Ball(RoundBall.from_chart(np.zeros(2), 1.0))
    res = kpmetric.kp_metric(D, np.array(q), SMALL)
    assert res.factor == pytest.approx(kpmetric.poincare_factor(q), rel=1e-6)
    assert np.allclose(res.tensor, res.factor * np.eye(2), rtol=0, atol=1e-6 * res.factor)


def test_lens_symmetry():
    """Intersection of two congruent caps is symmetric under swapping them."""
    a = Ball(RoundBall.from_chart(np.array([-0.3, 0.0]), 1.0))
    b = Ball(RoundBall.from_chart(np.array([0.3, 0.0]), 1.0))
    D = Intersection([a, b])
    for y in ([0.2, 0.1], [0.0, 0.4]):
        f1 = kpmetric.kp_metric(D, np.array(y), SMALL).factor
        f2 = kpmetric.kp_metric(D, np.array([-y[0], y[1]]), SMALL).factor
        assert f1 == pytest.approx(f2, rel=1e-6)
        # a smaller domain has a larger metric
        assert f1 >= kpmetric.kp_metric(a, np.array(y), SMALL).factor * (1 - 1e-9)


def test_rotation_invariance_of_ball_metric():
    B = RoundBall(np.array([0.2, -0.3, -0.9]), 1.0)
    Q = rotation(1, 3)
    x = kpmetric.from_chart(np.array([0.1, -0.2]))
    assert B.contains(x)
    # the round-relative factor is a conformal invariant of (B, x)
    f = kpmetric._conformal_factor(kpmetric.ball_metric(B, kpmetric.to_chart(x))) / kpmetric.round_factor(kpmetric.to_chart(x))
    yq = kpmetric.to_chart(Q @ x)
    fq = kpmetric._conformal_factor(kpmetric.ball_metric(B.rotated(Q), yq)) / kpmetric.round_factor(yq)
    assert f == pytest.approx(fq, rel=1e-6)


def test_sampler_monotone_in_budget():
    D = PointComplement(kpmetric.from_chart(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.5]])))
    y = np.array([0.4, 0.3])
    # candidate families are nested, so the raw sampled infimum can only drop
    prev = math.inf
    for k in (1, 2, 4, 8):
        f = kpmetric.kp_metric(D, y, KPSampler(random=16 * k, directions=4 * k, steps=8 * k, refine=False)).factor
        assert f <= prev
        prev = f
    refined = kpmetric.kp_metric(D, y, KPSampler(random=16, directions=4, steps=8)).factor
    assert refined <= kpmetric.kp_metric(D, y, KPSampler(random=16, directions=4, steps=8, refine=False)).factor


def test_not_hyperbolic_type():
    one = PointComplement(np.array([[0.0, 0.0, 1.0]]))
    with pytest.raises(NotHyperbolicTypeError):
        kpmetric.kp_metric(one, np.array([0.3, 0.2]))
    with pytest.raises(NotHyperbolicTypeError):
        kpmetric.kp_metric(PointComplement(np.zeros((0, 3)), 2), np.array([0.3, 0.2]))


def test_point_outside_domain():
    D = Ball(RoundBall.from_chart(np.zeros(2), 1.0))
    with pytest.raises(DomainError, match="not in the domain"):
        kpmetric.kp_metric(D, np.array([1.5, 0.0]), SMALL)


def test_union_of_balls_bracket():
    D = Union([Ball(RoundBall.from_chart(np.zeros(2), 1.0)), Ball(RoundBall.from_chart(np.array([1.2, 0.0]), 0.6))])
    res = kpmetric.kp_metric(D, np.array([0.2, 0.0]), SMALL)
    assert res.factor <= kpmetric.poincare_factor([0.2, 0.0]) * (1 + 1e-9)
    assert res.bracket[0] <= res.bracket[1] == res.factor


def test_domain_from_json():
    D = kpmetric.domain_from_json({"intersection": [{"ball": {"chart_center": [0, 0], "chart_radius": 1}}, {"points": [[0, 0, 1], [0, 1, 0]]}]})
    assert isinstance(D, Intersection) and D.n == 2
    with pytest.raises(DomainError):
        kpmetric.domain_from_json({"cone": 1})
    with pytest.raises(DomainError):
        kpmetric.domain_from_json({})


@pytest.mark.parametrize("y", [[1.0, 0.0], [0.3, 0.2], [-2.0, 1.5]])
def test_twice_punctured_sphere_is_flat_cylinder(y):
    """S^2 minus two antipodal points: the metric is |dy|^2 / |y|^2 in the chart."""
    D = PointComplement(np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]))
    y = np.array(y)
    assert kpmetric.kp_metric(D, y).factor == pytest.approx(1.0 / (y @ y), rel=1e-6)
