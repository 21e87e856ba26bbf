"""Actuator wrench map of the tilt-rotor airframe and its constrained inverse.

Each motor group tilts about an axis along its arm. Rotor ``i`` thrusts
along body +z rotated about that axis by ``alpha_i``; its drag torque acts
about the same tilted axis with sign ``s_i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .qp import solve_box_qp
from .state import NU, THROTTLE, TILT, ActuatorCommand, Wrench
from .vehicle import (
    DEFAULT_PARAMS,
    VehicleParams,
    _check_throttle,
    _poly,
    _poly_slope,
    hover_throttle,
)

_EZ = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class RotorGeometry:
    """Rotor hub positions, spin signs and tilt axes in the body frame.

    Rotor 1 sits at azimuth +45 deg (positive x, positive y); the others
    follow counter-clockwise at 90 deg spacing. ``spin_dirs`` is the sign
    of the drag torque along each rotor's thrust axis.
    """

    positions: NDArray[np.float64]
    spin_dirs: NDArray[np.float64]
    tilt_axes: NDArray[np.float64]

    def __post_init__(self) -> None:
        pos = np.array(self.positions, dtype=float).reshape(4, 3)
        spins = np.array(self.spin_dirs, dtype=float).reshape(4)
        axes = np.array(self.tilt_axes, dtype=float).reshape(4, 3)
        if not np.allclose(np.linalg.norm(axes, axis=1), 1.0, atol=1e-9):
            raise ValueError("tilt axes must be unit vectors")
        if not set(spins.tolist()) <= {-1.0, 1.0} or spins.sum() != 0:
            raise ValueError(f"spin_dirs must be +/-1 and sum to zero, got {spins}")
        for name, arr in (("positions", pos), ("spin_dirs", spins), ("tilt_axes", axes)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def x_config(cls, arm_length: float = DEFAULT_PARAMS.arm_length) -> "RotorGeometry":
        az = np.deg2rad([45.0, 135.0, 225.0, 315.0])
        radial = np.stack([np.cos(az), np.sin(az), np.zeros(4)], axis=1)
        return cls(positions=arm_length * radial, spin_dirs=[1.0, -1.0, 1.0, -1.0], tilt_axes=radial)

    @property
    def arm_length(self) -> float:
        return float(np.linalg.norm(self.positions[0]))

    def _frames(self):
        # Rodrigues split of R(a, alpha) e_z = cos*e_z + sin*(a x e_z) + (1-cos)*a(a.e_z)
        perp = np.cross(self.tilt_axes, _EZ)
        axial = self.tilt_axes * (self.tilt_axes @ _EZ)[:, None]
        return perp, axial


@dataclass
class AllocationResult:
    """Outcome of :func:`allocate`."""

    command: ActuatorCommand
    residual: NDArray[np.float64] = field(default_factory=lambda: np.zeros(6))
    iterations: int = 0
    converged: bool = False


def cross_rows(a: NDArray[np.float64], b: NDArray[np.float64]) -> NDArray[np.float64]:
    """Row-wise cross product of (..., 3) arrays; cheaper than ``np.cross`` on small batches."""
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0], axis=-1)


def _thrust_dirs(alpha: NDArray[np.float64], geometry: RotorGeometry):
    perp, axial = geometry._frames()
    c = np.cos(alpha)[..., None]
    s = np.sin(alpha)[..., None]
    dirs = c * _EZ + s * perp + (1.0 - c) * axial
    ddirs = -s * _EZ + c * perp + s * axial
    return dirs, ddirs


def wrench_batch(
    U: ArrayLike, params: VehicleParams, geometry: RotorGeometry
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Body force and torque for a batch of input vectors ``U`` of shape (n, 8).

    No range checks; throttles outside the curve's support still evaluate
    (finite-difference probes rely on this).
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    alpha = U[:, TILT]
    zeta = U[:, THROTTLE]
    thrust = _poly(zeta, params.thrust_coeffs)
    drag = _poly(zeta, params.torque_coeffs)
    dirs, _ = _thrust_dirs(alpha, geometry)
    f_rot = thrust[..., None] * dirs
    force = f_rot.sum(axis=1)
    torque = (
        cross_rows(geometry.positions[None], f_rot)
        + (geometry.spin_dirs * drag)[..., None] * dirs
    ).sum(axis=1)
    return force, torque


def wrench_jacobian(u: ArrayLike, params: VehicleParams, geometry: RotorGeometry):
    """Forward wrench (6,) and its analytic Jacobian (6, 8) at one input vector."""
    u = np.asarray(u, dtype=float).reshape(NU)
    alpha, zeta = u[TILT], u[THROTTLE]
    thrust = _poly(zeta, params.thrust_coeffs)
    drag = _poly(zeta, params.torque_coeffs)
    dthrust = _poly_slope(zeta, params.thrust_coeffs)
    ddrag = _poly_slope(zeta, params.torque_coeffs)
    dirs, ddirs = _thrust_dirs(alpha, geometry)
    r = geometry.positions
    s = geometry.spin_dirs

    w = np.empty(6)
    w[:3] = (thrust[:, None] * dirs).sum(axis=0)
    w[3:] = (np.cross(r, thrust[:, None] * dirs) + (s * drag)[:, None] * dirs).sum(axis=0)

    J = np.empty((6, NU))
    J[:3, TILT] = (thrust[:, None] * ddirs).T
    J[3:, TILT] = (thrust[:, None] * np.cross(r, ddirs) + (s * drag)[:, None] * ddirs).T
    J[:3, THROTTLE] = (dthrust[:, None] * dirs).T
    J[3:, THROTTLE] = (dthrust[:, None] * np.cross(r, dirs) + (s * ddrag)[:, None] * dirs).T
    return w, J


def actuator_wrench(
    cmd: ActuatorCommand,
    geometry: RotorGeometry | None = None,
    params: VehicleParams | None = None,
) -> Wrench:
    """Net body-frame wrench produced by ``cmd``."""
    params = params or DEFAULT_PARAMS
    geometry = geometry or RotorGeometry.x_config(params.arm_length)
    _check_throttle(cmd.zeta, params)
    tlo, thi = params.tilt_range
    if np.any(cmd.alpha_tilt < tlo) or np.any(cmd.alpha_tilt > thi):
        raise ValueError(f"tilt {cmd.alpha_tilt} outside [{tlo}, {thi}] rad")
    force, torque = wrench_batch(cmd.as_vector()[None], params, geometry)
    return Wrench(force[0], torque[0])


def input_bounds(params: VehicleParams) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    lo = np.empty(NU)
    hi = np.empty(NU)
    lo[TILT], hi[TILT] = params.tilt_range
    lo[THROTTLE], hi[THROTTLE] = params.throttle_range
    return lo, hi


def hover_command(params: VehicleParams | None = None) -> ActuatorCommand:
    params = params or DEFAULT_PARAMS
    return ActuatorCommand(zeta=np.full(4, hover_throttle(params)), alpha_tilt=np.zeros(4))


def planar_inverse(
    target: NDArray[np.float64],
    params: VehicleParams,
    geometry: RotorGeometry,
    active: NDArray[np.bool_] | None = None,
    sweeps: int = 4,
) -> NDArray[np.float64]:
    """Direct inversion through planar rotor forces.

    Each rotor force lies in the plane spanned by body +z and ``a_i x e_z``,
    so apart from drag torques the wrench is linear in the eight planar
    force components. Those are found by a slightly regularized least
    squares with nonnegative vertical components; drag torques are then
    folded in by fixed-point sweeps. The result is mapped back to
    (tilt, throttle) and clipped to the admissible set. Rotors outside
    ``active`` are switched off.
    """
    active = np.ones(4, dtype=bool) if active is None else np.asarray(active, dtype=bool)
    perp, _ = geometry._frames()
    r = geometry.positions
    cols = []
    for i in range(4):
        for d in (perp[i], _EZ):
            cols.append(np.concatenate([d, np.cross(r[i], d)]))
    G = np.array(cols).T
    H = G.T @ G + 1e-9 * np.eye(8)
    lo_v = np.tile([-np.inf, 0.0], 4)
    hi_v = np.full(8, np.inf)
    off = np.repeat(~active, 2)
    lo_v[off] = 0.0
    hi_v[off] = 0.0
    tlo, thi = params.tilt_range
    a2, a1, a0 = params.thrust_coeffs
    lo, hi = params.throttle_range
    f_max = float(_poly(hi, params.thrust_coeffs))

    u = np.zeros(NU)
    drag = np.zeros(6)
    for _ in range(sweeps):
        v, _, _ = solve_box_qp(H, -G.T @ (target - drag), lo_v, hi_v)
        v = v.reshape(4, 2)
        alpha = np.clip(np.arctan2(v[:, 0], v[:, 1]), tlo, thi)
        force = np.clip(np.hypot(v[:, 0], v[:, 1]), 0.0, f_max)
        zeta = np.where(
            force > 0.0, (-a1 + np.sqrt(a1 * a1 - 4.0 * a2 * (a0 - force))) / (2.0 * a2), lo
        )
        u[TILT] = alpha
        u[THROTTLE] = np.where(active, np.clip(zeta, lo, hi), lo)
        dirs, _ = _thrust_dirs(alpha, geometry)
        torque = (geometry.spin_dirs * _poly(u[THROTTLE], params.torque_coeffs))[:, None] * dirs
        drag = np.concatenate([np.zeros(3), torque.sum(axis=0)])
    return u


_ROTOR_SUBSETS = [
    np.isin(np.arange(4), combo)
    for k in (4, 3, 2)
    for combo in itertools.combinations(range(4), k)
]


def _solve_from(u, target, lo, hi, params, geometry, reg, tol, max_iter):
    w, J = wrench_jacobian(u, params, geometry)
    r = w - target
    cost = r @ r
    it = 0
    while it < max_iter and np.max(np.abs(r)) >= tol:
        it += 1
        grad = J.T @ r
        # variables pinned at a bound by the descent direction stay fixed
        pinned = ((u <= lo) & (grad > 0)) | ((u >= hi) & (grad < 0))
        free = ~pinned
        d = np.zeros(NU)
        Jf = J[:, free]
        d[free] = np.linalg.solve(Jf.T @ Jf + reg * np.eye(free.sum()), -Jf.T @ r)
        t = 1.0
        for _ in range(30):
            u_try = np.clip(u + t * d, lo, hi)
            w_try, J_try = wrench_jacobian(u_try, params, geometry)
            r_try = w_try - target
            if r_try @ r_try < cost:
                break
            t *= 0.5
        else:
            break
        u, w, J, r, cost = u_try, w_try, J_try, r_try, r_try @ r_try
    return u, r, it


def allocate(
    desired: Wrench,
    u_prev: ActuatorCommand | None = None,
    geometry: RotorGeometry | None = None,
    params: VehicleParams | None = None,
    *,
    reg: float = 1e-3,
    tol: float = 1e-6,
    max_iter: int = 50,
) -> AllocationResult:
    """Find an in-range command whose wrench matches ``desired``.

    Damped Gauss-Newton on ``||wrench(u) - desired||^2`` with steps
    projected onto the input box. The damping ``reg * ||du||^2`` is
    anchored at the running iterate and the iteration starts from
    ``u_prev``, so among the many exact solutions the one reached stays
    close to the previous command. Throttles starting inside the thrust
    dead band (zero slope) are lifted to the hover throttle first.
    """
    params = params or DEFAULT_PARAMS
    geometry = geometry or RotorGeometry.x_config(params.arm_length)
    target = desired.as_vector()
    if not np.all(np.isfinite(target)):
        raise ValueError("desired wrench must be finite")
    lo, hi = input_bounds(params)
    u0 = np.zeros(NU) if u_prev is None else u_prev.as_vector()
    u0 = np.clip(u0, lo, hi)

    def polish(start):
        u, r, it = _solve_from(start, target, lo, hi, params, geometry, reg, tol, max_iter)
        return u, r, it, float(np.max(np.abs(r)))

    first = u0
    w0, _ = wrench_jacobian(u0, params, geometry)
    if np.max(np.abs(w0 - target)) >= tol:
        dead = _poly_slope(u0[THROTTLE], params.thrust_coeffs) == 0.0
        if dead.any():
            first = u0.copy()
            first[THROTTLE][dead] = hover_throttle(params)
    u, r, total, err = polish(first)
    best = (u, r, err)
    if err >= tol:
        # direct-inversion starts, all rotors first, then rotor subsets
        # (a target may only be reachable with some rotors fully off)
        candidates = []
        for mask in _ROTOR_SUBSETS:
            cand = planar_inverse(target, params, geometry, active=mask)
            w_c, _ = wrench_jacobian(cand, params, geometry)
            candidates.append((float(np.max(np.abs(w_c - target))), len(candidates), cand))
        candidates.sort(key=lambda c: (c[0], c[1]))
        for _, _, cand in candidates[:4]:
            u, r, it, err = polish(cand)
            total += it
            if err < best[2]:
                best = (u, r, err)
            if err < tol:
                break
    u, r, _ = best
    return AllocationResult(
        command=ActuatorCommand.from_vector(u),
        residual=r,
        iterations=total,
        converged=bool(np.max(np.abs(r)) < tol),
    )
