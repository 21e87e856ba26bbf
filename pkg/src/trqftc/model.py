"""Rigid-body dynamics of the tilt-rotor quadcopter.

World frame is z-up; attitude is ZYX (yaw-pitch-roll) Euler angles
mapping body to world. Translation is integrated in the world frame and
rotation in the body frame::

    p'     = v
    m v'   = R(eta) F_B - m g e_z + d_force
    eta'   = W(eta) omega
    I w'   = tau_B - omega x I omega + d_torque

``(F_B, tau_B)`` come from :func:`trqftc.allocation.wrench_batch`. An
optional 6-vector acceleration correction (three world-frame linear
accelerations, three Euler-angle accelerations) is added on top; this is
how observer estimates enter the prediction model.

The ``*_batch`` functions take arrays with a leading batch axis and do no
range checking. The typed wrappers check and convert.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .allocation import RotorGeometry, wrench_batch
from .state import ATT, NU, NX, POS, VEL, ActuatorCommand, State, StateDerivative, Wrench
from .vehicle import DEFAULT_PARAMS, VehicleParams, _check_throttle

PITCH_LIMIT = math.pi / 2 - 1e-6


class SingularityError(ArithmeticError):
    """Raised when pitch reaches the Euler-angle gimbal singularity."""


def rotation_batch(eta: NDArray[np.float64]) -> NDArray[np.float64]:
    eta = np.atleast_2d(eta)
    cr, sr = np.cos(eta[:, 0]), np.sin(eta[:, 0])
    cp, sp = np.cos(eta[:, 1]), np.sin(eta[:, 1])
    cy, sy = np.cos(eta[:, 2]), np.sin(eta[:, 2])
    R = np.empty((eta.shape[0], 3, 3))
    R[:, 0, 0] = cy * cp
    R[:, 0, 1] = cy * sp * sr - sy * cr
    R[:, 0, 2] = cy * sp * cr + sy * sr
    R[:, 1, 0] = sy * cp
    R[:, 1, 1] = sy * sp * sr + cy * cr
    R[:, 1, 2] = sy * sp * cr - cy * sr
    R[:, 2, 0] = -sp
    R[:, 2, 1] = cp * sr
    R[:, 2, 2] = cp * cr
    return R


def rotation_from_euler(eta: ArrayLike) -> NDArray[np.float64]:
    """Body-to-world rotation matrix for ZYX Euler angles (roll, pitch, yaw)."""
    return rotation_batch(np.asarray(eta, dtype=float).reshape(1, 3))[0]


def _check_pitch(pitch: NDArray[np.float64]) -> None:
    if not np.all(np.abs(pitch) < PITCH_LIMIT):
        worst = float(np.nanmax(np.abs(pitch))) if np.any(np.isfinite(pitch)) else float("nan")
        raise SingularityError(f"|pitch| = {worst:.6g} reaches the Euler-rate singularity")


def euler_rate_batch(eta: NDArray[np.float64]) -> NDArray[np.float64]:
    eta = np.atleast_2d(eta)
    _check_pitch(eta[:, 1])
    cr, sr = np.cos(eta[:, 0]), np.sin(eta[:, 0])
    cp, tp = np.cos(eta[:, 1]), np.tan(eta[:, 1])
    W = np.zeros((eta.shape[0], 3, 3))
    W[:, 0, 0] = 1.0
    W[:, 0, 1] = sr * tp
    W[:, 0, 2] = cr * tp
    W[:, 1, 1] = cr
    W[:, 1, 2] = -sr
    W[:, 2, 1] = sr / cp
    W[:, 2, 2] = cr / cp
    return W


def euler_rate_inverse_batch(eta: NDArray[np.float64]) -> NDArray[np.float64]:
    """Map from Euler-angle rates to body rates (well defined everywhere)."""
    eta = np.atleast_2d(eta)
    cr, sr = np.cos(eta[:, 0]), np.sin(eta[:, 0])
    cp, sp = np.cos(eta[:, 1]), np.sin(eta[:, 1])
    M = np.zeros((eta.shape[0], 3, 3))
    M[:, 0, 0] = 1.0
    M[:, 0, 2] = -sp
    M[:, 1, 1] = cr
    M[:, 1, 2] = sr * cp
    M[:, 2, 1] = -sr
    M[:, 2, 2] = cr * cp
    return M


def euler_rate_matrix(eta: ArrayLike) -> NDArray[np.float64]:
    """Matrix ``W`` with ``eta_dot = W(eta) @ omega_B``.

    Raises :class:`SingularityError` when ``|pitch| >= pi/2 - 1e-6``.
    """
    return euler_rate_batch(np.asarray(eta, dtype=float).reshape(1, 3))[0]


def euler_rate_matrix_dot(eta: ArrayLike, eta_dot: ArrayLike) -> NDArray[np.float64]:
    """Time derivative of ``W(eta)`` along ``eta_dot``."""
    r, p = float(eta[0]), float(eta[1])
    rd, pd = float(eta_dot[0]), float(eta_dot[1])
    cr, sr = math.cos(r), math.sin(r)
    cp, tp = math.cos(p), math.tan(p)
    sec2 = 1.0 / (cp * cp)
    dW_dr = np.array([[0.0, cr * tp, -sr * tp], [0.0, -sr, -cr], [0.0, cr / cp, -sr / cp]])
    dW_dp = np.array(
        [[0.0, sr * sec2, cr * sec2], [0.0, 0.0, 0.0], [0.0, sr * tp / cp, cr * tp / cp]]
    )
    return rd * dW_dr + pd * dW_dp


def rigid_body_batch(
    X: NDArray[np.float64],
    F_B: NDArray[np.float64],
    tau_B: NDArray[np.float64],
    params: VehicleParams,
    d_force: ArrayLike | None = None,
    d_torque: ArrayLike | None = None,
    correction: ArrayLike | None = None,
    singular: str = "raise",
) -> NDArray[np.float64]:
    """State derivative for batches ``X`` (n, 12) under body wrenches (n, 3) + (n, 3).

    Rows at the Euler-rate singularity raise :class:`SingularityError`, or
    come back as NaN with ``singular="nan"`` (used by batched line searches).
    """
    X = np.atleast_2d(X)
    eta = X[:, ATT]
    bad = None
    if singular == "nan":
        bad = ~(np.abs(eta[:, 1]) < PITCH_LIMIT)
        if bad.any():
            eta = eta.copy()
            eta[bad, 1] = 0.0
        else:
            bad = None
    else:
        _check_pitch(eta[:, 1])
    # trig shared by the rotation, the Euler-rate map and its inverse
    cr, sr = np.cos(eta[:, 0]), np.sin(eta[:, 0])
    cp, sp = np.cos(eta[:, 1]), np.sin(eta[:, 1])
    cy, sy = np.cos(eta[:, 2]), np.sin(eta[:, 2])
    fx, fy, fz = F_B[:, 0], F_B[:, 1], F_B[:, 2]
    wx, wy, wz = X[:, 9], X[:, 10], X[:, 11]
    ixx, iyy, izz = params.inertia_diag
    m = params.mass

    out = np.empty_like(X, dtype=float)
    out[:, POS] = X[:, VEL]
    out[:, 3] = (cy * cp * fx + (cy * sp * sr - sy * cr) * fy + (cy * sp * cr + sy * sr) * fz) / m
    out[:, 4] = (sy * cp * fx + (sy * sp * sr + cy * cr) * fy + (sy * sp * cr - cy * sr) * fz) / m
    out[:, 5] = (-sp * fx + cp * sr * fy + cp * cr * fz) / m - params.gravity
    tp = sp / cp
    out[:, 6] = wx + sr * tp * wy + cr * tp * wz
    out[:, 7] = cr * wy - sr * wz
    out[:, 8] = (sr * wy + cr * wz) / cp
    tx, ty, tz = tau_B[:, 0], tau_B[:, 1], tau_B[:, 2]
    if d_torque is not None:
        dt = np.broadcast_to(np.asarray(d_torque, dtype=float), (X.shape[0], 3))
        tx, ty, tz = tx + dt[:, 0], ty + dt[:, 1], tz + dt[:, 2]
    out[:, 9] = (tx + (iyy - izz) * wy * wz) / ixx
    out[:, 10] = (ty + (izz - ixx) * wz * wx) / iyy
    out[:, 11] = (tz + (ixx - iyy) * wx * wy) / izz
    if d_force is not None:
        out[:, VEL] += np.asarray(d_force, dtype=float) / m
    if correction is not None:
        e = np.broadcast_to(np.asarray(correction, dtype=float), (X.shape[0], 6))
        out[:, VEL] += e[:, :3]
        er, ep, ey = e[:, 3], e[:, 4], e[:, 5]
        # body-rate image of the Euler-angle acceleration correction
        out[:, 9] += er - sp * ey
        out[:, 10] += cr * ep + sr * cp * ey
        out[:, 11] += -sr * ep + cr * cp * ey
    if bad is not None:
        out[bad] = np.nan
    return out


def dynamics_batch(
    X: NDArray[np.float64],
    U: NDArray[np.float64],
    params: VehicleParams,
    geometry: RotorGeometry,
    d_force: ArrayLike | None = None,
    d_torque: ArrayLike | None = None,
    correction: ArrayLike | None = None,
) -> NDArray[np.float64]:
    """State derivative for batches ``X`` (n, 12) and ``U`` (n, 8)."""
    F_B, tau_B = wrench_batch(np.atleast_2d(U), params, geometry)
    return rigid_body_batch(X, F_B, tau_B, params, d_force, d_torque, correction)


def rk4_batch(X, U, h, params, geometry, d_force=None, d_torque=None, correction=None):
    """One classical RK4 step of length ``h`` with inputs held constant."""
    f = dynamics_batch
    k1 = f(X, U, params, geometry, d_force, d_torque, correction)
    k2 = f(X + 0.5 * h * k1, U, params, geometry, d_force, d_torque, correction)
    k3 = f(X + 0.5 * h * k2, U, params, geometry, d_force, d_torque, correction)
    k4 = f(X + h * k3, U, params, geometry, d_force, d_torque, correction)
    return X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class RigidBodyStepper:
    """Scalar RK4 for the plant with a fixed body wrench.

    Between control updates the actuator command is held, so the body
    wrench is constant and only the attitude-dependent terms change. This
    path avoids numpy overhead on single states; it must agree with
    :func:`rk4_batch` to rounding.
    """

    def __init__(self, params: VehicleParams) -> None:
        self.m = params.mass
        self.g = params.gravity
        self.ixx, self.iyy, self.izz = params.inertia_diag

    def derivative(self, x, fb, tb, fe, te):
        _, _, _, vx, vy, vz, r, p, y, wx, wy, wz = x
        cr, sr = math.cos(r), math.sin(r)
        cp, sp = math.cos(p), math.sin(p)
        cy, sy = math.cos(y), math.sin(y)
        if abs(p) >= PITCH_LIMIT:
            raise SingularityError(f"pitch {p} at the Euler-rate singularity")
        fx, fy, fz = fb
        m = self.m
        ax = (cy * cp * fx + (cy * sp * sr - sy * cr) * fy + (cy * sp * cr + sy * sr) * fz + fe[0]) / m
        ay = (sy * cp * fx + (sy * sp * sr + cy * cr) * fy + (sy * sp * cr - cy * sr) * fz + fe[1]) / m
        az = (-sp * fx + cp * sr * fy + cp * cr * fz + fe[2]) / m - self.g
        tp = sp / cp
        rd = wx + sr * tp * wy + cr * tp * wz
        pd = cr * wy - sr * wz
        yd = (sr * wy + cr * wz) / cp
        ixx, iyy, izz = self.ixx, self.iyy, self.izz
        wxd = (tb[0] + te[0] + (iyy - izz) * wy * wz) / ixx
        wyd = (tb[1] + te[1] + (izz - ixx) * wz * wx) / iyy
        wzd = (tb[2] + te[2] + (ixx - iyy) * wx * wy) / izz
        return (vx, vy, vz, ax, ay, az, rd, pd, yd, wxd, wyd, wzd)

    def step(self, x, fb, tb, fe, te, h):
        f = self.derivative
        k1 = f(x, fb, tb, fe, te)
        k2 = f([a + 0.5 * h * b for a, b in zip(x, k1)], fb, tb, fe, te)
        k3 = f([a + 0.5 * h * b for a, b in zip(x, k2)], fb, tb, fe, te)
        k4 = f([a + h * b for a, b in zip(x, k3)], fb, tb, fe, te)
        h6 = h / 6.0
        return [a + h6 * (b1 + 2.0 * b2 + 2.0 * b3 + b4) for a, b1, b2, b3, b4 in zip(x, k1, k2, k3, k4)]


def _defaults(params, geometry):
    params = params or DEFAULT_PARAMS
    geometry = geometry or RotorGeometry.x_config(params.arm_length)
    return params, geometry


def _check_cmd(cmd: ActuatorCommand, params: VehicleParams) -> None:
    _check_throttle(cmd.zeta, params)
    tlo, thi = params.tilt_range
    if np.any(cmd.alpha_tilt < tlo) or np.any(cmd.alpha_tilt > thi):
        raise ValueError(f"tilt {cmd.alpha_tilt} outside [{tlo}, {thi}] rad")


def dynamics(
    state: State,
    cmd: ActuatorCommand,
    dist: Wrench | None = None,
    params: VehicleParams | None = None,
    geometry: RotorGeometry | None = None,
    correction: ArrayLike | None = None,
) -> StateDerivative:
    """Continuous-time state derivative ``f(x, u, d)``.

    ``dist.force`` is a world-frame force, ``dist.torque`` a body-frame
    torque.
    """
    params, geometry = _defaults(params, geometry)
    _check_cmd(cmd, params)
    dist = dist or Wrench.zero()
    xd = dynamics_batch(
        state.as_vector()[None],
        cmd.as_vector()[None],
        params,
        geometry,
        dist.force,
        dist.torque,
        correction,
    )[0]
    if not np.all(np.isfinite(xd)):
        raise FloatingPointError("non-finite state derivative")
    return StateDerivative.from_vector(xd)


def rk4_step(
    state: State,
    cmd: ActuatorCommand,
    dist: Wrench | None,
    h: float,
    params: VehicleParams | None = None,
    geometry: RotorGeometry | None = None,
    correction: ArrayLike | None = None,
) -> State:
    """Advance ``state`` by ``h`` seconds with ``cmd`` and ``dist`` held."""
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    params, geometry = _defaults(params, geometry)
    _check_cmd(cmd, params)
    dist = dist or Wrench.zero()
    x = rk4_batch(
        state.as_vector()[None],
        cmd.as_vector()[None],
        h,
        params,
        geometry,
        dist.force,
        dist.torque,
        correction,
    )[0]
    return State.from_vector(x)


__all__ = [
    "NU",
    "NX",
    "SingularityError",
    "dynamics",
    "dynamics_batch",
    "euler_rate_matrix",
    "rk4_batch",
    "rk4_step",
    "rotation_from_euler",
]
