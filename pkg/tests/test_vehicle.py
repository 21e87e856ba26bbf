from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trqftc.vehicle import (
    DEFAULT_PARAMS,
    ThrottleRangeError,
    VehicleParams,
    hover_throttle,
    throttle_for_thrust,
    thrust_from_throttle,
    torque_from_throttle,
)

# root of a2 z^2 + a1 z + a0 = m g / 4, bisected on the raw polynomial
HOVER_ROOT = 76.83912456166264

throttles = st.floats(0.0, 100.0, allow_nan=False)


def test_thrust_at_full_throttle():
    # 0.0007 * 100^2 + 0.0157 * 100 - 0.1891
    assert thrust_from_throttle(100.0) == pytest.approx(8.3809, abs=1e-12)


def test_thrust_clamped_at_zero():
    assert thrust_from_throttle(0.0) == 0.0


def test_torque_examples():
    assert torque_from_throttle(100.0) == pytest.approx(0.082, abs=1e-12)
    assert torque_from_throttle(50.0) == pytest.approx(0.032, abs=1e-12)
    assert torque_from_throttle(0.0) == 0.0


def test_hover_throttle_is_weight_root():
    z = hover_throttle()
    assert z == pytest.approx(HOVER_ROOT, rel=1e-12)
    assert thrust_from_throttle(z) == pytest.approx(2.1 * 9.81 / 4, rel=1e-12)


def test_vectorized_curves():
    z = np.array([0.0, 50.0, 100.0])
    np.testing.assert_allclose(thrust_from_throttle(z), [0.0, 2.3459, 8.3809], atol=1e-12)


@pytest.mark.parametrize("bad", [-1.0, 100.5, math.nan])
def test_out_of_range_throttle_raises(bad):
    with pytest.raises(ThrottleRangeError):
        thrust_from_throttle(bad)
    with pytest.raises(ThrottleRangeError):
        torque_from_throttle(bad)


def test_unreachable_thrust_raises():
    with pytest.raises(ThrottleRangeError):
        throttle_for_thrust(9.0)
    assert throttle_for_thrust(0.0) == 0.0


@given(throttles, throttles)
def test_curves_nonnegative_and_nondecreasing(a, b):
    lo, hi = min(a, b), max(a, b)
    for f in (thrust_from_throttle, torque_from_throttle):
        assert f(lo) >= 0.0
        assert f(hi) >= f(lo)


@given(st.floats(0.01, 8.38))
def test_throttle_for_thrust_inverts(force):
    assert thrust_from_throttle(throttle_for_thrust(force)) == pytest.approx(force, rel=1e-10)


def test_default_params():
    p = DEFAULT_PARAMS
    assert (p.mass, p.arm_length, p.inertia_diag[0]) == (2.1, 0.23, 0.01241)
    assert p.weight == pytest.approx(20.601)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mass": 0.0},
        {"inertia_diag": (0.01, -1.0, 0.02)},
        {"arm_length": 0.0},
        {"throttle_range": (0.0, 120.0)},
        {"tilt_range": (-1.0, 0.5)},
    ],
)
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ValueError):
        VehicleParams(**kwargs)
