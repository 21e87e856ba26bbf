"""Vector layouts shared by the plant, the allocator and the controller.

State vector (12)::

    [p_W(3), v_W(3), eta(3), omega_B(3)]

``eta`` holds roll, pitch, yaw of the body relative to the world (ZYX).

Input vector (8)::

    [alpha_tilt(4), zeta(4)]

tilts first, throttles last.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

NX = 12
NU = 8

POS = slice(0, 3)
VEL = slice(3, 6)
ATT = slice(6, 9)
RATE = slice(9, 12)

TILT = slice(0, 4)
THROTTLE = slice(4, 8)


def _vec3(v: ArrayLike) -> NDArray[np.float64]:
    a = np.array(v, dtype=float).reshape(3)
    return a


@dataclass
class State:
    """Rigid-body state: world position/velocity, Euler attitude, body rates."""

    p_W: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))
    v_W: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))
    eta: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))
    omega_B: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        self.p_W = _vec3(self.p_W)
        self.v_W = _vec3(self.v_W)
        self.eta = _vec3(self.eta)
        self.omega_B = _vec3(self.omega_B)

    def as_vector(self) -> NDArray[np.float64]:
        return np.concatenate([self.p_W, self.v_W, self.eta, self.omega_B])

    @classmethod
    def from_vector(cls, x: ArrayLike) -> "State":
        x = np.asarray(x, dtype=float).reshape(NX)
        return cls(x[POS], x[VEL], x[ATT], x[RATE])


@dataclass
class StateDerivative(State):
    """Time derivative of :class:`State`, same layout in per-second units."""


@dataclass
class ActuatorCommand:
    """Four throttles [%] and four motor-group tilt angles [rad]."""

    zeta: NDArray[np.float64] = field(default_factory=lambda: np.zeros(4))
    alpha_tilt: NDArray[np.float64] = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self) -> None:
        self.zeta = np.array(self.zeta, dtype=float).reshape(4)
        self.alpha_tilt = np.array(self.alpha_tilt, dtype=float).reshape(4)

    def as_vector(self) -> NDArray[np.float64]:
        return np.concatenate([self.alpha_tilt, self.zeta])

    @classmethod
    def from_vector(cls, u: ArrayLike) -> "ActuatorCommand":
        u = np.asarray(u, dtype=float).reshape(NU)
        return cls(zeta=u[THROTTLE], alpha_tilt=u[TILT])

    def clamped(self, params) -> "ActuatorCommand":
        lo, hi = params.throttle_range
        tlo, thi = params.tilt_range
        return ActuatorCommand(np.clip(self.zeta, lo, hi), np.clip(self.alpha_tilt, tlo, thi))


@dataclass
class Wrench:
    """Force [N] and torque [N m] pair.

    Actuator wrenches are expressed in the body frame. For disturbances the
    force is taken in the world frame and the torque in the body frame.
    """

    force: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))
    torque: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        self.force = _vec3(self.force)
        self.torque = _vec3(self.torque)
        if not (np.all(np.isfinite(self.force)) and np.all(np.isfinite(self.torque))):
            raise ValueError("wrench entries must be finite")

    def as_vector(self) -> NDArray[np.float64]:
        return np.concatenate([self.force, self.torque])

    @classmethod
    def from_vector(cls, w: ArrayLike) -> "Wrench":
        w = np.asarray(w, dtype=float).reshape(6)
        return cls(w[:3], w[3:])

    @classmethod
    def zero(cls) -> "Wrench":
        return cls()
