"""Closed-loop simulation of one controller on one scenario."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray

from ..allocation import RotorGeometry, hover_command, input_bounds, wrench_batch
from ..eso import EsoGains, VehicleObserver
from ..faults import FaultSpec, WindSpec, apply_fault_vector, wind_wrench
from ..model import RigidBodyStepper, SingularityError
from ..nmpc import NmpcSolver, OcpConfig, receding_horizon_input, shift_warm_start
from ..state import NU, NX
from ..vehicle import DEFAULT_PARAMS, VehicleParams
from .reference import Trajectory, horizon_references, reference

log = logging.getLogger(__name__)

CONTROLLERS = ("quad_nmpc", "trq_nmpc", "trq_eso_nmpc")


@dataclass(frozen=True)
class CrashBounds:
    """Run is declared crashed once the vehicle leaves these bounds."""

    position_box: float = 50.0
    attitude_limit: float = 1.4
    min_altitude: float = 0.0

    def violated(self, x) -> bool:
        return (
            max(abs(x[0]), abs(x[1]), abs(x[2])) > self.position_box
            or abs(x[6]) > self.attitude_limit
            or abs(x[7]) > self.attitude_limit
            or x[2] < self.min_altitude
        )


@dataclass
class Scenario:
    """Everything needed to reproduce one closed-loop run."""

    name: str = "scenario"
    controller: str = "trq_eso_nmpc"
    trajectory: Trajectory = field(default_factory=Trajectory)
    fault: FaultSpec = field(default_factory=FaultSpec)
    wind: WindSpec = field(default_factory=lambda: WindSpec(force_magnitude=0.0))
    duration: float = 30.0
    control_dt: float = 0.1
    sim_dt: float = 0.001
    params: VehicleParams = DEFAULT_PARAMS
    geometry: RotorGeometry | None = None
    ocp: OcpConfig | None = None
    eso: EsoGains = field(default_factory=EsoGains)
    crash_bounds: CrashBounds = field(default_factory=CrashBounds)
    initial_offset: float = 0.0

    def __post_init__(self) -> None:
        if self.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}, got {self.controller!r}")
        if self.duration <= 0 or self.control_dt <= 0 or self.sim_dt <= 0:
            raise ValueError("duration, control_dt and sim_dt must be positive")
        ratio = self.control_dt / self.sim_dt
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise ValueError(f"sim_dt {self.sim_dt} must divide control_dt {self.control_dt}")
        if self.geometry is None:
            self.geometry = RotorGeometry.x_config(self.params.arm_length)
        if self.ocp is None:
            lo, hi = input_bounds(self.params)
            self.ocp = OcpConfig(input_lower=lo, input_upper=hi)

    @property
    def substeps(self) -> int:
        return int(round(self.control_dt / self.sim_dt))

    @property
    def control_steps(self) -> int:
        return int(round(self.duration / self.control_dt))

    def ocp_config(self) -> OcpConfig:
        return self.ocp.frozen_tilt() if self.controller == "quad_nmpc" else self.ocp


@dataclass
class RunLog:
    """Per-control-step record of a run; the last row is the crash point if any."""

    scenario: str
    controller: str
    t: NDArray[np.float64]
    state: NDArray[np.float64]
    cmd: NDArray[np.float64]
    eff: NDArray[np.float64]
    ref: NDArray[np.float64]
    eso_e: NDArray[np.float64]
    sqp_iters: NDArray[np.int64]
    kkt_residual: NDArray[np.float64]
    solve_time: NDArray[np.float64]
    fallback: NDArray[np.bool_]
    crashed: bool = False
    crash_time: float | None = None
    crash_reason: str = ""

    def __len__(self) -> int:
        return int(self.t.shape[0])

    @classmethod
    def empty(cls, scenario: str = "", controller: str = "") -> "RunLog":
        return cls(
            scenario,
            controller,
            np.zeros(0),
            np.zeros((0, NX)),
            np.zeros((0, NU)),
            np.zeros((0, NU)),
            np.zeros((0, NX)),
            np.zeros((0, 6)),
            np.zeros(0, dtype=np.int64),
            np.zeros(0),
            np.zeros(0),
            np.zeros(0, dtype=bool),
        )

    @property
    def crashed_rows(self) -> NDArray[np.bool_]:
        rows = np.zeros(len(self), dtype=bool)
        if self.crashed and len(self):
            rows[-1] = True
        return rows


def _initial_state(s: Scenario, seed: int | None) -> NDArray[np.float64]:
    x = reference(s.trajectory, 0.0)
    if s.initial_offset > 0.0:
        rng = np.random.default_rng(seed)
        x[0:3] += rng.uniform(-s.initial_offset, s.initial_offset, 3)
    return x


def run_scenario(s: Scenario, seed: int | None = 0) -> RunLog:
    """Simulate ``s`` in closed loop.

    The controller samples the true state every ``control_dt``; the plant
    integrates with RK4 at ``sim_dt`` while the command (and the fault
    applied to it) is held. With ``trq_eso_nmpc`` the observer runs at
    ``sim_dt`` and its correction enters the next solve. ``seed`` only
    drives the optional random initial offset.
    """
    cfg = s.ocp_config()
    params, geometry = s.params, s.geometry
    solver = NmpcSolver.for_vehicle(cfg, params, geometry)
    stepper = RigidBodyStepper(params)
    observer = VehicleObserver(params, geometry, s.eso) if s.controller == "trq_eso_nmpc" else None

    x = _initial_state(s, seed)
    if observer is not None:
        observer.reset(x)
    u_prev = np.clip(hover_command(params).as_vector(), cfg.input_lower, cfg.input_upper)
    warm = None
    rows: dict[str, list[Any]] = {k: [] for k in ("t", "x", "u", "ue", "r", "e", "it", "kkt", "wall", "fb")}
    crashed, crash_time, reason = False, None, ""
    h = s.sim_dt
    zero3 = (0.0, 0.0, 0.0)

    def record(t, x, u, ue, e, it, kkt, wall, fb):
        rows["t"].append(t)
        rows["x"].append(np.asarray(x, dtype=float))
        rows["u"].append(u)
        rows["ue"].append(ue)
        rows["r"].append(reference(s.trajectory, t))
        rows["e"].append(e)
        rows["it"].append(it)
        rows["kkt"].append(kkt)
        rows["wall"].append(wall)
        rows["fb"].append(fb)

    for k in range(s.control_steps):
        t = k * s.control_dt
        corr = observer.correction(x) if observer is not None else None
        refs = horizon_references(s.trajectory, t, cfg.dt, cfg.horizon)
        tic = time.perf_counter()
        sol = solver.solve(x, refs, corr, warm)
        wall = time.perf_counter() - tic
        fallback = sol.status == "model_error"
        if fallback:
            log.warning("%s t=%.2f: solver %s, holding previous input", s.name, t, sol.status)
            u = u_prev
            warm = None
        else:
            u = receding_horizon_input(sol, cfg)
            warm = shift_warm_start(sol)
        u_eff = apply_fault_vector(u, s.fault, t)
        e = corr.e if corr is not None else np.zeros(6)
        record(t, x, u, u_eff, e, sol.sqp_iters, sol.kkt_residual, wall, fallback)

        fb, tb = wrench_batch(u_eff[None], params, geometry)
        fb, tb = tuple(fb[0]), tuple(tb[0])
        fw = tuple(wind_wrench(s.wind, t).force)
        if observer is not None:
            observer.set_command(u)
        xs = list(x)
        try:
            for j in range(s.substeps):
                if observer is not None:
                    observer.update(np.asarray(xs), h)
                xs = stepper.step(xs, fb, tb, fw, zero3, h)
                if not all(math.isfinite(v) for v in xs):
                    reason = "non-finite state"
                elif s.crash_bounds.violated(xs):
                    reason = "crash bounds"
                else:
                    continue
                crashed, crash_time = True, t + (j + 1) * h
                break
        except SingularityError as exc:
            crashed, crash_time, reason = True, t + (j + 1) * h, str(exc)
        x = np.asarray(xs, dtype=float)
        u_prev = u
        if crashed:
            log.info("%s crashed at t=%.3f (%s)", s.name, crash_time, reason)
            record(crash_time, x, u, u_eff, e, 0, np.nan, 0.0, False)
            break

    return RunLog(
        scenario=s.name,
        controller=s.controller,
        t=np.asarray(rows["t"], dtype=float),
        state=np.asarray(rows["x"], dtype=float).reshape(-1, NX),
        cmd=np.asarray(rows["u"], dtype=float).reshape(-1, NU),
        eff=np.asarray(rows["ue"], dtype=float).reshape(-1, NU),
        ref=np.asarray(rows["r"], dtype=float).reshape(-1, NX),
        eso_e=np.asarray(rows["e"], dtype=float).reshape(-1, 6),
        sqp_iters=np.asarray(rows["it"], dtype=np.int64),
        kkt_residual=np.asarray(rows["kkt"], dtype=float),
        solve_time=np.asarray(rows["wall"], dtype=float),
        fallback=np.asarray(rows["fb"], dtype=bool),
        crashed=crashed,
        crash_time=crash_time,
        crash_reason=reason,
    )
