"""Vehicle parameters and the propeller characteristic curves.

Throttle ``zeta`` is in percent and maps to rotor thrust [N] and drag
torque [N m] through quadratic fits identified on the prototype's motor
groups. Both fits go negative at low throttle; the negative part is
clamped to zero because a propeller cannot pull.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray


class ThrottleRangeError(ValueError):
    """Raised when a throttle value lies outside the admissible range."""


@dataclass(frozen=True)
class VehicleParams:
    """Physical parameters of the tilt-rotor quadcopter.

    Attributes
    ----------
    mass : vehicle mass [kg].
    inertia_diag : (Ixx, Iyy, Izz) [kg m^2].
    arm_length : rotor hub distance from the body centre [m].
    gravity : gravitational acceleration [m/s^2].
    thrust_coeffs : (a2, a1, a0) of F = a2 z^2 + a1 z + a0 [N].
    torque_coeffs : (b2, b1, b0) of tau = b2 z^2 + b1 z + b0 [N m].
    throttle_range : admissible throttle [%].
    tilt_range : admissible motor-group tilt [rad].
    """

    mass: float = 2.1
    inertia_diag: tuple[float, float, float] = (0.01241, 0.01241, 0.02365)
    arm_length: float = 0.23
    gravity: float = 9.81
    thrust_coeffs: tuple[float, float, float] = (0.0007, 0.0157, -0.1891)
    torque_coeffs: tuple[float, float, float] = (2e-6, 0.0007, -0.008)
    throttle_range: tuple[float, float] = (0.0, 100.0)
    tilt_range: tuple[float, float] = (-math.pi / 2, math.pi / 2)

    def __post_init__(self) -> None:
        object.__setattr__(self, "inertia_diag", tuple(float(v) for v in self.inertia_diag))
        object.__setattr__(self, "thrust_coeffs", tuple(float(v) for v in self.thrust_coeffs))
        object.__setattr__(self, "torque_coeffs", tuple(float(v) for v in self.torque_coeffs))
        object.__setattr__(self, "throttle_range", tuple(float(v) for v in self.throttle_range))
        object.__setattr__(self, "tilt_range", tuple(float(v) for v in self.tilt_range))
        if self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if len(self.inertia_diag) != 3 or min(self.inertia_diag) <= 0:
            raise ValueError(f"inertia entries must be positive, got {self.inertia_diag}")
        if self.arm_length <= 0:
            raise ValueError(f"arm_length must be positive, got {self.arm_length}")
        lo, hi = self.throttle_range
        if not (0.0 <= lo <= hi <= 100.0):
            raise ValueError(f"throttle_range must lie inside [0, 100], got {self.throttle_range}")
        tlo, thi = self.tilt_range
        if tlo > thi or not math.isclose(tlo, -thi, abs_tol=1e-12):
            raise ValueError(f"tilt_range must be symmetric about 0, got {self.tilt_range}")

    @property
    def inertia(self) -> NDArray[np.float64]:
        return np.asarray(self.inertia_diag, dtype=float)

    @property
    def weight(self) -> float:
        return self.mass * self.gravity


def _poly(z: ArrayLike, coeffs: tuple[float, float, float]) -> NDArray[np.float64]:
    c2, c1, c0 = coeffs
    z = np.asarray(z, dtype=float)
    return np.maximum(0.0, (c2 * z + c1) * z + c0)


def _poly_slope(z: ArrayLike, coeffs: tuple[float, float, float]) -> NDArray[np.float64]:
    # derivative of the clamped curve; zero inside the dead band
    c2, c1, c0 = coeffs
    z = np.asarray(z, dtype=float)
    raw = (c2 * z + c1) * z + c0
    return np.where(raw > 0.0, 2.0 * c2 * z + c1, 0.0)


def _check_throttle(zeta: ArrayLike, params: VehicleParams) -> None:
    z = np.asarray(zeta, dtype=float)
    lo, hi = params.throttle_range
    if not np.all(np.isfinite(z)) or np.any(z < lo) or np.any(z > hi):
        raise ThrottleRangeError(f"throttle {zeta!r} outside [{lo}, {hi}] %")


def thrust_from_throttle(zeta: ArrayLike, params: VehicleParams | None = None):
    """Rotor thrust [N] for throttle ``zeta`` [%], clamped at zero."""
    params = params or DEFAULT_PARAMS
    _check_throttle(zeta, params)
    out = _poly(zeta, params.thrust_coeffs)
    return float(out) if out.ndim == 0 else out


def torque_from_throttle(zeta: ArrayLike, params: VehicleParams | None = None):
    """Rotor drag torque [N m] for throttle ``zeta`` [%], clamped at zero."""
    params = params or DEFAULT_PARAMS
    _check_throttle(zeta, params)
    out = _poly(zeta, params.torque_coeffs)
    return float(out) if out.ndim == 0 else out


def throttle_for_thrust(force: float, params: VehicleParams | None = None) -> float:
    """Invert the thrust curve on its increasing branch.

    Returns the throttle producing ``force`` newtons per rotor; raises
    :class:`ThrottleRangeError` if the force is not reachable.
    """
    params = params or DEFAULT_PARAMS
    a2, a1, a0 = params.thrust_coeffs
    if force <= 0.0:
        return float(params.throttle_range[0])
    disc = a1 * a1 - 4.0 * a2 * (a0 - force)
    zeta = (-a1 + math.sqrt(disc)) / (2.0 * a2)
    lo, hi = params.throttle_range
    if not lo <= zeta <= hi:
        raise ThrottleRangeError(f"thrust {force} N needs throttle {zeta:.3f} % outside [{lo}, {hi}]")
    return zeta


def hover_throttle(params: VehicleParams | None = None) -> float:
    """Throttle at which four level rotors carry the vehicle weight."""
    params = params or DEFAULT_PARAMS
    return throttle_for_thrust(params.weight / 4.0, params)


DEFAULT_PARAMS = VehicleParams()
