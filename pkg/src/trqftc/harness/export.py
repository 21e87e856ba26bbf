"""CSV persistence of run logs and metrics tables.

Floats are written with 9 significant digits, so a deterministic run
always produces the same bytes. Solver wall time is deliberately left out
of the run log for that reason; it only appears in the metrics table.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..state import NU, NX
from .metrics import METRIC_COLUMNS, Metrics
from .scenario import RunLog

LOG_COLUMNS = (
    ["t", "p_x", "p_y", "p_z", "v_x", "v_y", "v_z", "roll", "pitch", "yaw", "wx", "wy", "wz"]
    + ["ref_px", "ref_py", "ref_pz", "ref_yaw"]
    + [f"zeta{i}_cmd" for i in range(1, 5)]
    + [f"alpha{i}_cmd" for i in range(1, 5)]
    + [f"zeta{i}_eff" for i in range(1, 5)]
    + [f"eso_e{i}" for i in range(1, 7)]
    + ["sqp_iters", "kkt_residual", "crashed"]
)


class ExportError(OSError):
    """File could not be written or read; the message names the path."""


def _fmt(v: float) -> str:
    return "%.9g" % v


def _write(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def log_rows(run: RunLog) -> list[list[str]]:
    crashed = run.crashed_rows
    rows = []
    for k in range(len(run)):
        x, r, u, ue, e = run.state[k], run.ref[k], run.cmd[k], run.eff[k], run.eso_e[k]
        row = [_fmt(run.t[k])]
        row += [_fmt(v) for v in x]
        row += [_fmt(v) for v in (r[0], r[1], r[2], r[8])]
        row += [_fmt(v) for v in u[4:8]]
        row += [_fmt(v) for v in u[0:4]]
        row += [_fmt(v) for v in ue[4:8]]
        row += [_fmt(v) for v in e]
        row += [str(int(run.sqp_iters[k])), _fmt(run.kkt_residual[k]), str(int(crashed[k]))]
        rows.append(row)
    return rows


def export_csv(run: RunLog, path) -> Path:
    """Write ``run`` in the fixed column order of ``LOG_COLUMNS``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LOG_COLUMNS)
    w.writerows(log_rows(run))
    return _write(path, buf.getvalue())


def read_log_csv(path, scenario: str = "", controller: str = "") -> RunLog:
    """Parse a file written by :func:`export_csv` back into a :class:`RunLog`.

    Columns the CSV does not carry (reference velocities and attitude rates,
    effective tilts, wall time) come back as zeros, nominal tilts and NaN
    respectively.
    """
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            body = [row for row in reader]
    except OSError as exc:
        raise ExportError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if header is None or tuple(header) != tuple(LOG_COLUMNS):
        raise ValueError(f"{path}: header does not match the run-log columns")
    a = np.array(body, dtype=float).reshape(-1, len(LOG_COLUMNS))
    col = {name: i for i, name in enumerate(LOG_COLUMNS)}
    n = a.shape[0]
    ref = np.zeros((n, NX))
    ref[:, 0:3] = a[:, col["ref_px"] : col["ref_pz"] + 1]
    ref[:, 8] = a[:, col["ref_yaw"]]
    cmd = np.empty((n, NU))
    cmd[:, 0:4] = a[:, col["alpha1_cmd"] : col["alpha4_cmd"] + 1]
    cmd[:, 4:8] = a[:, col["zeta1_cmd"] : col["zeta4_cmd"] + 1]
    eff = cmd.copy()
    eff[:, 4:8] = a[:, col["zeta1_eff"] : col["zeta4_eff"] + 1]
    crashed_col = a[:, col["crashed"]].astype(bool)
    crashed = bool(crashed_col.any())
    return RunLog(
        scenario=scenario or path.stem,
        controller=controller,
        t=a[:, 0].copy(),
        state=a[:, 1 : 1 + NX].copy(),
        cmd=cmd,
        eff=eff,
        ref=ref,
        eso_e=a[:, col["eso_e1"] : col["eso_e6"] + 1].copy(),
        sqp_iters=a[:, col["sqp_iters"]].astype(np.int64),
        kkt_residual=a[:, col["kkt_residual"]].copy(),
        solve_time=np.full(n, np.nan),
        fallback=np.zeros(n, dtype=bool),
        crashed=crashed,
        crash_time=float(a[crashed_col, 0][-1]) if crashed else None,
    )


def _metric_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return _fmt(v)
    return str(v)


def export_metrics_csv(rows: list[Metrics], path) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRIC_COLUMNS)
    for m in rows:
        d = asdict(m)
        w.writerow([_metric_cell(d[c]) for c in METRIC_COLUMNS])
    return _write(path, buf.getvalue())


def read_metrics_csv(path) -> list[Metrics]:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            records = list(csv.DictReader(fh))
    except OSError as exc:
        raise ExportError(f"cannot read {path}: {exc.strerror or exc}") from exc
    out = []
    for rec in records:
        vals = {}
        for c in METRIC_COLUMNS:
            v = rec[c]
            if c in ("scenario", "controller"):
                vals[c] = v
            elif c == "crashed":
                vals[c] = bool(int(v))
            elif c == "crash_time":
                vals[c] = float(v) if v else None
            else:
                vals[c] = float(v) if v else math.nan
        out.append(Metrics(**vals))
    return out
