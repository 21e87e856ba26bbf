"""Actuator faults and wind disturbances injected into the simulated plant.

These act on the plant only; the controller's prediction model never sees
them, which is what makes them faults rather than known dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .state import ActuatorCommand, Wrench

FAULT_KINDS = ("none", "constant_effectiveness", "sinusoidal_effectiveness")


@dataclass(frozen=True)
class FaultSpec:
    """Loss-of-effectiveness fault on one motor's throttle.

    ``constant_effectiveness`` scales the throttle by ``lambda_const``;
    ``sinusoidal_effectiveness`` by ``bias - amp * sin(freq * t)``. Both
    act from ``start_time`` on. ``freq`` is in rad/s.
    """

    kind: str = "none"
    motor_index: int = 0
    lambda_const: float = 0.5
    amp: float = 0.2
    bias: float = 0.8
    freq: float = 0.01
    start_time: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in FAULT_KINDS:
            raise ValueError(f"fault kind must be one of {FAULT_KINDS}, got {self.kind!r}")
        if not 0 <= self.motor_index <= 3:
            raise ValueError(f"motor_index must be in 0..3, got {self.motor_index}")
        if not 0.0 <= self.lambda_const <= 1.0:
            raise ValueError(f"lambda_const must lie in [0, 1], got {self.lambda_const}")
        if self.start_time < 0:
            raise ValueError("start_time must be nonnegative")


@dataclass(frozen=True)
class WindSpec:
    """Constant horizontal wind force in the world frame.

    ``speed`` is informational; the plant sees ``force_magnitude`` along
    ``direction``.
    """

    speed: float = 8.0
    force_magnitude: float = 2.0
    direction: tuple[float, float, float] = (1.0, 0.0, 0.0)
    start_time: float = 0.0

    def __post_init__(self) -> None:
        d = np.asarray(self.direction, dtype=float).reshape(3)
        n = float(np.linalg.norm(d))
        if n == 0.0 or abs(d[2]) > 1e-12 * n:
            raise ValueError(f"wind direction must be a nonzero horizontal vector, got {self.direction}")
        object.__setattr__(self, "direction", tuple(float(v) for v in d / n))
        if self.force_magnitude < 0 or self.start_time < 0:
            raise ValueError("force_magnitude and start_time must be nonnegative")


def effectiveness(spec: FaultSpec, t: float) -> float:
    """Throttle multiplier of the faulty motor at time ``t``, in [0, 1]."""
    if spec.kind == "none" or t < spec.start_time:
        return 1.0
    if spec.kind == "constant_effectiveness":
        value = spec.lambda_const
    else:
        value = spec.bias - spec.amp * math.sin(spec.freq * t)
    return min(1.0, max(0.0, value))


def apply_fault(cmd: ActuatorCommand, spec: FaultSpec, t: float) -> ActuatorCommand:
    """Command the plant actually receives: the faulty motor's throttle scaled."""
    lam = effectiveness(spec, t)
    if lam == 1.0:
        return cmd
    zeta = np.array(cmd.zeta, dtype=float)
    zeta[spec.motor_index] *= lam
    return ActuatorCommand(zeta=zeta, alpha_tilt=np.array(cmd.alpha_tilt, dtype=float))


def apply_fault_vector(u: NDArray[np.float64], spec: FaultSpec, t: float) -> NDArray[np.float64]:
    """:func:`apply_fault` on an ``[alpha(4), zeta(4)]`` input vector."""
    out = np.array(u, dtype=float)
    out[4 + spec.motor_index] *= effectiveness(spec, t)
    return out


def wind_wrench(spec: WindSpec, t: float) -> Wrench:
    """World-frame wind force (zero torque); zero before ``start_time``."""
    if t < spec.start_time or spec.force_magnitude == 0.0:
        return Wrench.zero()
    return Wrench(force=spec.force_magnitude * np.asarray(spec.direction), torque=np.zeros(3))


@dataclass(frozen=True)
class FaultPreset:
    fault: FaultSpec = field(default_factory=FaultSpec)
    wind: WindSpec = field(default_factory=WindSpec)


def presets(fault_start: float = 5.0) -> dict[str, FaultPreset]:
    """Named disturbance set-ups; all include the default wind."""
    return {
        "fault50": FaultPreset(FaultSpec("constant_effectiveness", start_time=fault_start), WindSpec()),
        "fault-sine": FaultPreset(FaultSpec("sinusoidal_effectiveness"), WindSpec()),
        "no-fault": FaultPreset(FaultSpec("none"), WindSpec()),
    }


def preset(name: str, fault_start: float = 5.0) -> FaultPreset:
    table = presets(fault_start)
    if name not in table:
        raise KeyError(f"unknown fault preset {name!r}; choose from {sorted(table)}")
    return table[name]


__all__ = [
    "FAULT_KINDS",
    "FaultPreset",
    "FaultSpec",
    "WindSpec",
    "apply_fault",
    "apply_fault_vector",
    "effectiveness",
    "preset",
    "presets",
    "wind_wrench",
]
