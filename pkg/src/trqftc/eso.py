"""Nonlinear extended state observers for the six output channels.

Each channel (x, y, z, roll, pitch, yaw) is treated as a second-order
system ``y'' = f + b0 * u`` and observed with the triple

    xhat1' = xhat2 + beta1 * g1(e)
    xhat2' = xhat3 + beta2 * g2(e) + b0 * u
    xhat3' = beta3 * g3(e)

where ``e = y - xhat1`` and ``g_i(e) = |e|^alpha_i sgn(e)``. ``xhat3``
absorbs whatever the nominal model does not explain: wind, rotor faults,
coupling. It is fed to the predictive controller as an additive
acceleration correction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .allocation import wrench_batch
from .model import (
    euler_rate_inverse_batch,
    euler_rate_matrix,
    euler_rate_matrix_dot,
    rotation_from_euler,
)
from .state import ATT, POS, RATE, VEL, NX, State
from .vehicle import VehicleParams

CHANNELS = ("x", "y", "z", "roll", "pitch", "yaw")


def nonlinear_gain(e: ArrayLike, alpha: ArrayLike):
    """``|e|^alpha * sign(e)``; odd, continuous at zero, identity for alpha = 1."""
    e = np.asarray(e, dtype=float)
    out = np.abs(e) ** alpha * np.sign(e)
    return float(out) if out.ndim == 0 else out


@dataclass
class EsoGains:
    """Observer gains; scalars or per-channel arrays.

    ``bandwidth`` builds the usual pole-placement gains
    ``(3 w, 3 w^2, w^3)``; the defaults are its ``w = 200`` rad/s values,
    fast enough to pick up a rotor fault within one 0.1 s control
    interval while the Euler step at 1 ms stays well inside its
    stability limit. The default exponents ``(0.9, 0.8, 0.7)``
    follow the homogeneous family ``alpha_i = i*a - (i - 1)`` with
    ``a = 0.9``; sharper exponents such as ``(1, 0.5, 0.25)`` limit-cycle
    with these gains.
    """

    beta1: ArrayLike = 600.0
    beta2: ArrayLike = 120000.0
    beta3: ArrayLike = 8.0e6
    alpha1: ArrayLike = 0.9
    alpha2: ArrayLike = 0.8
    alpha3: ArrayLike = 0.7
    b0: ArrayLike = 1.0

    def __post_init__(self) -> None:
        for name in ("beta1", "beta2", "beta3"):
            if np.any(np.asarray(getattr(self, name)) <= 0):
                raise ValueError(f"{name} must be positive")
        for name in ("alpha1", "alpha2", "alpha3"):
            a = np.asarray(getattr(self, name))
            if np.any(a <= 0) or np.any(a > 1):
                raise ValueError(f"{name} must lie in (0, 1]")

    @classmethod
    def bandwidth(
        cls,
        omega_o: float = 200.0,
        alphas: Sequence[float] = (0.9, 0.8, 0.7),
        b0: ArrayLike = 1.0,
    ) -> "EsoGains":
        a1, a2, a3 = alphas
        return cls(3.0 * omega_o, 3.0 * omega_o**2, omega_o**3, a1, a2, a3, b0)


@dataclass
class EsoChannelState:
    """Observer state of one channel, or of a bank when fields are arrays."""

    xhat1: ArrayLike = 0.0
    xhat2: ArrayLike = 0.0
    xhat3: ArrayLike = 0.0


def eso_step(
    ch: EsoChannelState,
    y_meas: ArrayLike,
    u_effect: ArrayLike,
    gains: EsoGains,
    dt: float,
) -> EsoChannelState:
    """One forward-Euler step of the observer."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    e = np.asarray(y_meas, dtype=float) - ch.xhat1
    x1 = ch.xhat1 + dt * (ch.xhat2 + gains.beta1 * nonlinear_gain(e, gains.alpha1))
    x2 = ch.xhat2 + dt * (
        ch.xhat3 + gains.beta2 * nonlinear_gain(e, gains.alpha2) + gains.b0 * np.asarray(u_effect)
    )
    x3 = ch.xhat3 + dt * gains.beta3 * nonlinear_gain(e, gains.alpha3)
    return EsoChannelState(x1, x2, x3)


@dataclass
class ModelCorrection:
    """Observer output handed to the controller.

    ``e`` holds three world-frame linear accelerations [m/s^2] and three
    Euler-angle accelerations [rad/s^2]. ``output_error`` is the estimated
    minus the measured output in state layout.
    """

    e: NDArray[np.float64] = field(default_factory=lambda: np.zeros(6))
    output_error: NDArray[np.float64] = field(default_factory=lambda: np.zeros(NX))

    def __post_init__(self) -> None:
        self.e = np.array(self.e, dtype=float).reshape(6)
        self.output_error = np.array(self.output_error, dtype=float).reshape(NX)
        if not (np.all(np.isfinite(self.e)) and np.all(np.isfinite(self.output_error))):
            raise ValueError("model correction must be finite")

    @classmethod
    def zero(cls) -> "ModelCorrection":
        return cls()


def _stack(channels) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    if isinstance(channels, EsoChannelState):
        x1, x2, x3 = (np.asarray(v, dtype=float).reshape(6) for v in (channels.xhat1, channels.xhat2, channels.xhat3))
        return x1, x2, x3
    chans = list(channels)
    if len(chans) != 6:
        raise ValueError(f"expected 6 channels, got {len(chans)}")
    return tuple(np.array([float(getattr(c, k)) for c in chans]) for k in ("xhat1", "xhat2", "xhat3"))


def build_correction(channels, measured: State) -> ModelCorrection:
    """Assemble the controller correction from the six channel observers.

    ``channels`` is a sequence of six :class:`EsoChannelState` in
    (x, y, z, roll, pitch, yaw) order, or one array-valued state.
    """
    x1, x2, x3 = _stack(channels)
    x = measured.as_vector()
    err = np.empty(NX)
    err[POS] = x1[:3] - x[POS]
    err[VEL] = x2[:3] - x[VEL]
    err[ATT] = x1[3:] - x[ATT]
    # Euler-rate estimate expressed as body rates to match the state entries
    err[RATE] = euler_rate_inverse_batch(x[ATT])[0] @ x2[3:] - x[RATE]
    return ModelCorrection(e=x3, output_error=err)


def output_error_cost(correction: ModelCorrection | None) -> float:
    """Squared norm of the observer output error."""
    if correction is None:
        return 0.0
    oe = correction.output_error
    return float(oe @ oe)


class VehicleObserver:
    """Bank of six channel observers wired to the nominal vehicle model.

    The input effect of each channel is the nominal generalized force of
    the commanded wrench: ``m * a_nominal`` for translation and
    ``I_ii * eta_ddot_nominal`` for attitude, so that ``b0 * u`` is the
    nominal channel acceleration and ``xhat3`` the unexplained remainder.
    """

    def __init__(self, params: VehicleParams, geometry, gains: EsoGains | None = None) -> None:
        self.params = params
        self.geometry = geometry
        inertia = params.inertia
        b0 = np.concatenate([np.full(3, 1.0 / params.mass), 1.0 / inertia])
        base = gains or EsoGains()
        self.gains = EsoGains(
            base.beta1, base.beta2, base.beta3, base.alpha1, base.alpha2, base.alpha3, b0
        )
        self._effort_scale = np.concatenate([np.full(3, params.mass), inertia])
        self.state = EsoChannelState(np.zeros(6), np.zeros(6), np.zeros(6))
        self._wrench = (np.zeros(3), np.zeros(3))

    @staticmethod
    def outputs(x: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.concatenate([x[POS], x[ATT]])

    @staticmethod
    def output_rates(x: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.concatenate([x[VEL], euler_rate_matrix(x[ATT]) @ x[RATE]])

    def reset(self, x: NDArray[np.float64]) -> None:
        self.state = EsoChannelState(self.outputs(x), self.output_rates(x), np.zeros(6))

    def set_command(self, u: NDArray[np.float64]) -> None:
        force, torque = wrench_batch(u[None], self.params, self.geometry)
        self._wrench = (force[0], torque[0])

    def nominal_acceleration(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Channel accelerations the nominal model predicts for the held command."""
        p = self.params
        force, torque = self._wrench
        eta, omega = x[ATT], x[RATE]
        acc = rotation_from_euler(eta) @ force / p.mass
        acc[2] -= p.gravity
        inertia = p.inertia
        omega_dot = (torque - np.cross(omega, inertia * omega)) / inertia
        W = euler_rate_matrix(eta)
        eta_dot = W @ omega
        eta_ddot = euler_rate_matrix_dot(eta, eta_dot) @ omega + W @ omega_dot
        return np.concatenate([acc, eta_ddot])

    def update(self, x: NDArray[np.float64], dt: float) -> None:
        u_effect = self._effort_scale * self.nominal_acceleration(x)
        self.state = eso_step(self.state, self.outputs(x), u_effect, self.gains, dt)

    def correction(self, x: NDArray[np.float64]) -> ModelCorrection:
        return build_correction(self.state, State.from_vector(x))
