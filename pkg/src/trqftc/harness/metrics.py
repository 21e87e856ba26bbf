"""Tracking metrics of a closed-loop run."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .reference import wrap_angle
from .scenario import RunLog

log = logging.getLogger(__name__)

STARTUP_EXCLUSION = 2.0


@dataclass(frozen=True)
class Metrics:
    """Summary of one run.

    RMSE values skip the first ``STARTUP_EXCLUSION`` seconds; ``yaw_drift``
    is the largest wrapped yaw error over the whole run. Solver statistics
    average over control steps (the crash row, if any, is not a step).
    """

    scenario: str
    controller: str
    position_rmse: float
    position_max_err: float
    angle_rmse: float
    roll_rmse: float
    pitch_rmse: float
    yaw_rmse: float
    yaw_drift: float
    crashed: bool
    crash_time: float | None
    mean_solve_iters: float
    mean_solve_wall_time: float

    def __post_init__(self) -> None:
        if self.crashed and self.crash_time is None:
            raise ValueError("crashed metrics need a crash_time")


def _errors(run: RunLog):
    pos = run.state[:, 0:3] - run.ref[:, 0:3]
    ang = np.column_stack(
        [
            run.state[:, 6] - run.ref[:, 6],
            run.state[:, 7] - run.ref[:, 7],
            wrap_angle(run.state[:, 8] - run.ref[:, 8]),
        ]
    )
    return pos, ang


def compute_metrics(run: RunLog, startup: float = STARTUP_EXCLUSION) -> Metrics:
    """Metrics of ``run``; falls back to all samples when none follow ``startup``."""
    if len(run) == 0:
        raise ValueError("cannot compute metrics of an empty log")
    pos, ang = _errors(run)
    keep = run.t >= startup
    if not keep.any():
        log.warning("%s: no samples after %.1f s, using the whole run", run.scenario, startup)
        keep = np.ones(len(run), dtype=bool)
    pe, ae = pos[keep], ang[keep]
    axis_rmse = np.sqrt(np.mean(ae**2, axis=0))
    steps = ~run.crashed_rows
    if not steps.any():
        steps = np.ones(len(run), dtype=bool)
    return Metrics(
        scenario=run.scenario,
        controller=run.controller,
        position_rmse=float(np.sqrt(np.mean(np.sum(pe**2, axis=1)))),
        position_max_err=float(np.max(np.linalg.norm(pe, axis=1))),
        angle_rmse=float(np.sqrt(np.mean(np.sum(ae**2, axis=1)))),
        roll_rmse=float(axis_rmse[0]),
        pitch_rmse=float(axis_rmse[1]),
        yaw_rmse=float(axis_rmse[2]),
        yaw_drift=float(np.max(np.abs(ang[:, 2]))),
        crashed=bool(run.crashed),
        crash_time=run.crash_time,
        mean_solve_iters=float(np.mean(run.sqp_iters[steps])),
        mean_solve_wall_time=float(np.mean(run.solve_time[steps])),
    )


METRIC_COLUMNS = (
    "scenario",
    "controller",
    "position_rmse",
    "position_max_err",
    "angle_rmse",
    "roll_rmse",
    "pitch_rmse",
    "yaw_rmse",
    "yaw_drift",
    "crashed",
    "crash_time",
    "mean_solve_iters",
    "mean_solve_wall_time",
)


def format_table(rows: list[Metrics]) -> str:
    """Fixed-width text table of the headline numbers."""
    head = f"{'scenario':<24} {'controller':<14} {'pos_rmse':>9} {'pos_max':>9} {'ang_rmse':>9} {'yaw_max':>9} {'crash':>8} {'iters':>6}"
    lines = [head, "-" * len(head)]
    for m in rows:
        crash = f"{m.crash_time:.2f}" if m.crashed else "-"
        lines.append(
            f"{m.scenario:<24} {m.controller:<14} {m.position_rmse:9.4f} {m.position_max_err:9.4f} "
            f"{m.angle_rmse:9.4f} {m.yaw_drift:9.4f} {crash:>8} {m.mean_solve_iters:6.1f}"
        )
    return "\n".join(lines)
