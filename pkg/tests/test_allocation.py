from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trqftc.allocation import (
    RotorGeometry,
    actuator_wrench,
    allocate,
    hover_command,
    input_bounds,
    wrench_batch,
    wrench_jacobian,
)
from trqftc.state import ActuatorCommand, Wrench
from trqftc.vehicle import DEFAULT_PARAMS, hover_throttle, thrust_from_throttle, torque_from_throttle

HOVER_ROOT = 76.83912456166264


def rodrigues(axis, angle):
    K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * K @ K


def reference_wrench(u, params, geometry):
    """Per-rotor sum using explicit rotation matrices."""
    force = np.zeros(3)
    torque = np.zeros(3)
    for i in range(4):
        d = rodrigues(geometry.tilt_axes[i], u[i]) @ [0.0, 0.0, 1.0]
        f = float(thrust_from_throttle(u[4 + i], params)) * d
        q = geometry.spin_dirs[i] * float(torque_from_throttle(u[4 + i], params)) * d
        force += f
        torque += np.cross(geometry.positions[i], f) + q
    return np.concatenate([force, torque])


def random_inputs(rng, n, params):
    lo, hi = input_bounds(params)
    return rng.uniform(lo, hi, size=(n, 8))


def test_x_config_layout(geometry):
    k = 0.23 / math.sqrt(2)
    np.testing.assert_allclose(geometry.positions[0], [k, k, 0], atol=1e-15)
    np.testing.assert_allclose(geometry.positions[2], [-k, -k, 0], atol=1e-15)
    np.testing.assert_array_equal(geometry.spin_dirs, [1, -1, 1, -1])
    assert geometry.arm_length == pytest.approx(0.23)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"spin_dirs": [1, 1, 1, -1]},
        {"spin_dirs": [1, -1, 2, -2]},
        {"tilt_axes": np.ones((4, 3))},
    ],
)
def test_geometry_validation(geometry, kwargs):
    base = {"positions": geometry.positions, "spin_dirs": geometry.spin_dirs, "tilt_axes": geometry.tilt_axes}
    base.update(kwargs)
    with pytest.raises(ValueError):
        RotorGeometry(**base)


def test_hover_wrench(params, geometry):
    w = actuator_wrench(hover_command(params), geometry, params)
    np.testing.assert_allclose(w.force, [0, 0, params.weight], atol=1e-9)
    np.testing.assert_allclose(w.torque, 0.0, atol=1e-12)


def test_zero_command_gives_zero_wrench(params, geometry):
    w = actuator_wrench(ActuatorCommand(), geometry, params)
    np.testing.assert_array_equal(w.as_vector(), np.zeros(6))


def test_single_rotor_tilted_by_hand(params, geometry):
    # rotor 1 at full throttle tilted a quarter turn about its arm
    u = ActuatorCommand(zeta=[100, 0, 0, 0], alpha_tilt=[math.pi / 2, 0, 0, 0])
    w = actuator_wrench(u, geometry, params)
    f, q = 8.3809, 0.082
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(w.force, [f * s, -f * s, 0], atol=1e-12)
    np.testing.assert_allclose(w.torque, [q * s, -q * s, -0.23 * f], atol=1e-12)


def test_single_rotor_upright_by_hand(params, geometry):
    u = ActuatorCommand(zeta=[0, 50, 0, 0])
    w = actuator_wrench(u, geometry, params)
    f, q = 2.3459, 0.032
    k = 0.23 / math.sqrt(2)
    # rotor 2 sits at (-k, k) and spins negative
    np.testing.assert_allclose(w.force, [0, 0, f], atol=1e-12)
    np.testing.assert_allclose(w.torque, [k * f, k * f, -q], atol=1e-12)


def test_wrench_batch_matches_rodrigues(rng, params, geometry):
    U = random_inputs(rng, 50, params)
    f, t = wrench_batch(U, params, geometry)
    want = np.array([reference_wrench(u, params, geometry) for u in U])
    np.testing.assert_allclose(np.hstack([f, t]), want, atol=1e-12)


def test_actuator_wrench_range_checks(params, geometry):
    with pytest.raises(ValueError):
        actuator_wrench(ActuatorCommand(alpha_tilt=[0, 0, 0, 1.6]), geometry, params)
    with pytest.raises(ValueError):
        actuator_wrench(ActuatorCommand(zeta=[-1, 0, 0, 0]), geometry, params)


def test_jacobian_matches_central_differences(rng, params, geometry):
    U = random_inputs(rng, 20, params)
    U[:, 4:] = rng.uniform(20, 95, (20, 4))  # away from the dead band kink
    h = 1e-6
    for u in U:
        w, J = wrench_jacobian(u, params, geometry)
        np.testing.assert_allclose(w, reference_wrench(u, params, geometry), atol=1e-12)
        J_fd = np.empty((6, 8))
        for j in range(8):
            d = np.zeros(8)
            d[j] = h
            J_fd[:, j] = (reference_wrench(u + d, params, geometry) - reference_wrench(u - d, params, geometry)) / (2 * h)
        np.testing.assert_allclose(J, J_fd, atol=1e-7)


def test_allocate_hover_trim(params, geometry):
    res = allocate(Wrench(force=[0, 0, 2.1 * 9.81]), ActuatorCommand(), geometry, params)
    assert res.converged
    np.testing.assert_allclose(res.command.zeta, HOVER_ROOT, rtol=1e-4)
    assert np.max(np.abs(res.command.alpha_tilt)) < 1e-6
    assert np.max(np.abs(res.residual)) < 1e-6
    assert hover_throttle(params) == pytest.approx(HOVER_ROOT, rel=1e-12)


def test_allocate_zero_wrench(params, geometry):
    res = allocate(Wrench.zero(), None, geometry, params)
    assert res.converged
    w = actuator_wrench(res.command, geometry, params)
    assert np.max(np.abs(w.as_vector())) < 1e-6


def test_allocate_stays_near_previous_command(params, geometry):
    prev = hover_command(params)
    res = allocate(actuator_wrench(prev, geometry, params), prev, geometry, params)
    assert res.iterations == 0
    np.testing.assert_array_equal(res.command.as_vector(), prev.as_vector())


def test_allocate_rejects_nonfinite(params, geometry):
    with pytest.raises(ValueError):
        allocate(Wrench(force=[0, 0, np.nan]), None, geometry, params)


def test_allocate_round_trip_random(params, geometry):
    rng = np.random.default_rng(7)
    lo, hi = input_bounds(params)
    worst = 0.0
    for _ in range(1000):
        u = np.concatenate([rng.uniform(-1.2, 1.2, 4), rng.uniform(30, 100, 4)])
        target = reference_wrench(u, params, geometry)
        res = allocate(Wrench.from_vector(target), None, geometry, params)
        got = res.command.as_vector()
        assert np.all(got >= lo) and np.all(got <= hi)
        worst = max(worst, float(np.max(np.abs(reference_wrench(got, params, geometry) - target))))
    assert worst < 1e-5


def test_allocate_unreachable_reports_best_effort(params, geometry):
    res = allocate(Wrench(force=[0, 0, 100.0]), None, geometry, params)
    assert not res.converged
    # all rotors saturate upright at full throttle
    np.testing.assert_allclose(res.command.zeta, 100.0)
    assert res.residual[2] == pytest.approx(4 * 8.3809 - 100.0, abs=1e-6)


@given(st.floats(-0.3, 0.3))
def test_allocated_yaw_torque_property(yaw_torque):
    g = RotorGeometry.x_config(DEFAULT_PARAMS.arm_length)
    target = Wrench(force=[0, 0, DEFAULT_PARAMS.weight], torque=[0, 0, yaw_torque])
    res = allocate(target, hover_command(DEFAULT_PARAMS), g, DEFAULT_PARAMS)
    assert res.converged
    w = actuator_wrench(res.command, g, DEFAULT_PARAMS)
    np.testing.assert_allclose(w.as_vector(), target.as_vector(), atol=1e-5)


def test_single_rotor_at_hover_throttle(params, geometry):
    u = ActuatorCommand(zeta=[HOVER_ROOT, 0, 0, 0])
    w = actuator_wrench(u, geometry, params)
    f = float(thrust_from_throttle(HOVER_ROOT, params))
    assert f == pytest.approx(params.weight / 4, rel=1e-12)
    q = float(torque_from_throttle(HOVER_ROOT, params))
    np.testing.assert_allclose(w.force, [0, 0, f], atol=1e-12)
    np.testing.assert_allclose(w.torque, np.cross(geometry.positions[0], [0, 0, f]) + [0, 0, q], atol=1e-12)


def test_allocate_from_hover(params, geometry):
    res = allocate(Wrench(force=[0, 0, params.weight]), hover_command(params), geometry, params)
    assert res.converged
    np.testing.assert_allclose(res.command.zeta, HOVER_ROOT, rtol=1e-4)
    assert np.max(np.abs(res.command.alpha_tilt)) < 1e-6


def test_allocate_zero_from_zero_is_exact(params, geometry):
    res = allocate(Wrench.zero(), ActuatorCommand(), geometry, params)
    np.testing.assert_array_equal(res.command.as_vector(), np.zeros(8))


@given(st.lists(st.floats(0, 100), min_size=4, max_size=4))
def test_untilted_yaw_torque_is_drag_sum(zeta):
    g = RotorGeometry.x_config(DEFAULT_PARAMS.arm_length)
    w = actuator_wrench(ActuatorCommand(zeta=zeta), g, DEFAULT_PARAMS)
    drag = sum(s * float(torque_from_throttle(z, DEFAULT_PARAMS)) for s, z in zip(g.spin_dirs, zeta))
    assert w.torque[2] == drag


@given(
    st.lists(st.floats(-math.pi / 2, math.pi / 2), min_size=4, max_size=4),
    st.lists(st.floats(0, 100), min_size=4, max_size=4),
)
def test_forward_map_finite_on_box(alpha, zeta):
    g = RotorGeometry.x_config(DEFAULT_PARAMS.arm_length)
    w = actuator_wrench(ActuatorCommand(zeta=zeta, alpha_tilt=alpha), g, DEFAULT_PARAMS)
    assert np.all(np.isfinite(w.as_vector()))
