from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trqftc.harness.reference import (
    Trajectory,
    horizon_references,
    reference,
    reference_state,
    wrap_angle,
)

CIRCLE = Trajectory()
EIGHT = Trajectory("figure_eight")
times = st.floats(0, 100)


def central(f, t, h=1e-5):
    return (f(t + h) - f(t - h)) / (2 * h)


def test_hover_is_constant():
    tr = Trajectory("hover")
    for t in (0.0, 3.3, 100.0):
        np.testing.assert_array_equal(reference(tr, t), [0, 0, 2] + [0] * 9)


def test_circle_periodic():
    np.testing.assert_allclose(reference(CIRCLE, 0.0)[:6], reference(CIRCLE, 20.0)[:6], atol=1e-12)
    np.testing.assert_allclose(reference(CIRCLE, 0.0)[:3], [2, 0, 2])


@given(times)
def test_circle_speed(t):
    assert np.linalg.norm(reference(CIRCLE, t)[3:6]) == pytest.approx(2 * math.pi * 2 / 20)


@pytest.mark.parametrize("tr", [CIRCLE, EIGHT, Trajectory("waypoints", waypoints=((0, 0, 1), (2, 1, 3), (2, -1, 2)))])
@pytest.mark.parametrize("t", [0.7, 4.1, 7.3, 12.9])
def test_velocity_is_position_derivative(tr, t):
    vel = central(lambda s: reference(tr, s)[:3], t)
    np.testing.assert_allclose(reference(tr, t)[3:6], vel, atol=1e-7)


@pytest.mark.parametrize("tr", [CIRCLE, EIGHT])
@pytest.mark.parametrize("t", [0.3, 5.2, 9.9, 14.8, 19.1])
def test_yaw_follows_tangent(tr, t):
    x = reference(tr, t)
    assert wrap_angle(x[8] - math.atan2(x[4], x[3])) == pytest.approx(0.0, abs=1e-12)
    assert x[11] == pytest.approx(central(lambda s: reference(tr, s)[8], t), abs=1e-6)
    np.testing.assert_array_equal(x[6:8], 0.0)


def test_figure_eight_heading_continuous():
    ts = np.linspace(0, 40, 8001)
    yaw = np.array([reference(EIGHT, t)[8] for t in ts])
    assert np.max(np.abs(np.diff(yaw))) < 0.01


def test_step_reference():
    tr = Trajectory("step", step_size=1.0, step_time=2.0)
    assert reference(tr, 1.99)[0] == 0.0
    assert reference(tr, 2.0)[0] == 1.0


def test_waypoints_endpoints():
    tr = Trajectory("waypoints", waypoints=((0, 0, 1), (2, 1, 3)), segment_time=4.0)
    np.testing.assert_allclose(reference(tr, 0.0)[:3], [0, 0, 1])
    np.testing.assert_allclose(reference(tr, 2.0)[:3], [1, 0.5, 2])
    np.testing.assert_allclose(reference(tr, 4.0)[:6], [2, 1, 3, 0, 0, 0])
    np.testing.assert_allclose(reference(tr, 50.0)[:3], [2, 1, 3])
    single = Trajectory("waypoints", waypoints=((1, 2, 3),))
    np.testing.assert_allclose(reference(single, 9.0)[:3], [1, 2, 3])


def test_horizon_references_start_one_interval_ahead():
    R = horizon_references(CIRCLE, 1.0, 0.1, 10)
    assert R.shape == (10, 12)
    np.testing.assert_allclose(R[0], reference(CIRCLE, 1.1))
    np.testing.assert_allclose(R[-1], reference(CIRCLE, 2.0))


def test_reference_state_wraps_vector():
    np.testing.assert_array_equal(reference_state(CIRCLE, 3.0).as_vector(), reference(CIRCLE, 3.0))


@pytest.mark.parametrize(
    "kw", [{"kind": "spiral"}, {"period": 0.0}, {"kind": "waypoints"}, {"waypoints": ((1, 2),)}]
)
def test_trajectory_validation(kw):
    with pytest.raises(ValueError):
        Trajectory(**kw)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        reference(CIRCLE, -1.0)


@given(st.floats(-100, 100))
def test_wrap_angle_range(a):
    w = float(wrap_angle(a))
    assert -math.pi <= w < math.pi
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)
