"""Reference trajectories sampled as full 12-entry state references."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ..state import NX, State

TRAJECTORY_KINDS = ("hover", "step", "circle", "figure_eight", "waypoints")


@dataclass(frozen=True)
class Trajectory:
    """Reference path description.

    ``circle`` runs counter-clockwise around the origin starting at
    ``(radius, 0, altitude)``; ``figure_eight`` is a lemniscate of Gerono
    through the origin. Both point the nose along the path tangent.
    ``step`` jumps ``step_size`` along x at ``step_time`` from the hover
    point; ``waypoints`` blends between consecutive points with a quintic
    smoothstep, ``segment_time`` per leg.
    """

    kind: str = "circle"
    radius: float = 2.0
    period: float = 20.0
    altitude: float = 2.0
    step_size: float = 1.0
    step_time: float = 0.0
    waypoints: tuple[tuple[float, float, float], ...] = field(default_factory=tuple)
    segment_time: float = 5.0

    def __post_init__(self) -> None:
        if self.kind not in TRAJECTORY_KINDS:
            raise ValueError(f"trajectory kind must be one of {TRAJECTORY_KINDS}, got {self.kind!r}")
        if self.period <= 0 or self.segment_time <= 0:
            raise ValueError("period and segment_time must be positive")
        wps = tuple(tuple(float(c) for c in p) for p in self.waypoints)
        if any(len(p) != 3 for p in wps):
            raise ValueError("waypoints must be 3-vectors")
        if self.kind == "waypoints" and len(wps) < 1:
            raise ValueError("waypoints trajectory needs at least one point")
        object.__setattr__(self, "waypoints", wps)


def _quintic(s: float) -> tuple[float, float, float]:
    """Smoothstep ``10s^3 - 15s^4 + 6s^5`` and its first two derivatives."""
    s = min(1.0, max(0.0, s))
    return (
        s**3 * (10.0 - 15.0 * s + 6.0 * s * s),
        30.0 * s * s * (1.0 - s) ** 2,
        60.0 * s * (1.0 - s) * (1.0 - 2.0 * s),
    )


def _figure_eight(traj: Trajectory, t: float):
    w = 2.0 * math.pi / traj.period
    r = traj.radius
    p = (r * math.sin(w * t), 0.5 * r * math.sin(2.0 * w * t), traj.altitude)
    v = (r * w * math.cos(w * t), r * w * math.cos(2.0 * w * t), 0.0)
    a = (-r * w * w * math.sin(w * t), -2.0 * r * w * w * math.sin(2.0 * w * t))
    heading = math.atan2(v[1], v[0])
    # branch choice keeping the heading continuous along this curve
    if v[0] < 0.0 and v[1] > 0.0:
        heading -= 2.0 * math.pi
    rate = (v[0] * a[1] - v[1] * a[0]) / (v[0] ** 2 + v[1] ** 2)
    return p, v, heading, rate


def reference(traj: Trajectory, t: float) -> NDArray[np.float64]:
    """Reference state vector at time ``t``; roll and pitch references are level."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    x = np.zeros(NX)
    x[2] = traj.altitude
    if traj.kind == "hover":
        return x
    if traj.kind == "step":
        if t >= traj.step_time:
            x[0] = traj.step_size
        return x
    if traj.kind == "circle":
        w = 2.0 * math.pi / traj.period
        c, s = math.cos(w * t), math.sin(w * t)
        x[0:2] = traj.radius * c, traj.radius * s
        x[3:5] = -traj.radius * w * s, traj.radius * w * c
        x[8] = w * t + 0.5 * math.pi
        x[11] = w
        return x
    if traj.kind == "figure_eight":
        p, v, heading, rate = _figure_eight(traj, t)
        x[0:3] = p
        x[3:6] = v
        x[8] = heading
        x[11] = rate
        return x
    pts = np.asarray(traj.waypoints, dtype=float)
    if len(pts) == 1:
        x[0:3] = pts[0]
        return x
    k = int(t // traj.segment_time)
    if k >= len(pts) - 1:
        x[0:3] = pts[-1]
        return x
    sigma, dsigma, _ = _quintic((t - k * traj.segment_time) / traj.segment_time)
    delta = pts[k + 1] - pts[k]
    x[0:3] = pts[k] + sigma * delta
    x[3:6] = dsigma / traj.segment_time * delta
    return x


def reference_state(traj: Trajectory, t: float) -> State:
    return State.from_vector(reference(traj, t))


def horizon_references(traj: Trajectory, t: float, dt: float, n: int) -> NDArray[np.float64]:
    """References for the states reached after each of the next ``n`` intervals."""
    return np.array([reference(traj, t + (i + 1) * dt) for i in range(n)])


def wrap_angle(a):
    """Map angles to [-pi, pi)."""
    return (np.asarray(a) + np.pi) % (2.0 * np.pi) - np.pi
