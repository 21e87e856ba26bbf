from __future__ import annotations

import numpy as np
import pytest

from trqftc.harness.export import (
    LOG_COLUMNS,
    ExportError,
    export_csv,
    export_metrics_csv,
    read_log_csv,
    read_metrics_csv,
)
from trqftc.harness.metrics import compute_metrics
from trqftc.harness.scenario import RunLog

from test_metrics import synthetic_log


def test_column_order():
    assert LOG_COLUMNS[:13] == ["t", "p_x", "p_y", "p_z", "v_x", "v_y", "v_z", "roll", "pitch", "yaw", "wx", "wy", "wz"]
    assert LOG_COLUMNS[13:17] == ["ref_px", "ref_py", "ref_pz", "ref_yaw"]
    assert LOG_COLUMNS[17:21] == ["zeta1_cmd", "zeta2_cmd", "zeta3_cmd", "zeta4_cmd"]
    assert LOG_COLUMNS[21:25] == ["alpha1_cmd", "alpha2_cmd", "alpha3_cmd", "alpha4_cmd"]
    assert LOG_COLUMNS[25:29] == ["zeta1_eff", "zeta2_eff", "zeta3_eff", "zeta4_eff"]
    assert LOG_COLUMNS[29:35] == [f"eso_e{i}" for i in range(1, 7)]
    assert LOG_COLUMNS[35:] == ["sqp_iters", "kkt_residual", "crashed"]


def test_empty_log_is_header_only(tmp_path):
    path = export_csv(RunLog.empty(), tmp_path / "empty.csv")
    assert path.read_text() == ",".join(LOG_COLUMNS) + "\n"
    assert len(read_log_csv(path)) == 0


def random_log(rng, crashed=False):
    run = synthetic_log(n=30, crashed=crashed)
    run.state += rng.normal(scale=0.1, size=run.state.shape)
    run.cmd = rng.uniform(0, 100, size=run.cmd.shape)
    run.cmd[:, :4] = rng.uniform(-1.5, 1.5, size=(30, 4))
    run.eff = run.cmd.copy()
    run.eff[:, 4] *= 0.5
    run.eso_e = rng.normal(size=(30, 6))
    run.kkt_residual = 10.0 ** rng.uniform(-9, 0, 30)
    run.sqp_iters = rng.integers(0, 30, 30)
    return run


def test_re_export_is_byte_identical(tmp_path, rng):
    run = random_log(rng)
    a = export_csv(run, tmp_path / "a.csv").read_bytes()
    b = export_csv(run, tmp_path / "b.csv").read_bytes()
    assert a == b


def test_round_trip(tmp_path, rng):
    run = random_log(rng, crashed=True)
    back = read_log_csv(export_csv(run, tmp_path / "r.csv"), "syn", "trq_nmpc")
    for name in ("t", "state", "cmd", "eff", "eso_e", "kkt_residual"):
        np.testing.assert_allclose(getattr(back, name), getattr(run, name), rtol=1e-8, atol=1e-9)
    np.testing.assert_allclose(back.ref[:, [0, 1, 2, 8]], run.ref[:, [0, 1, 2, 8]], rtol=1e-8, atol=1e-9)
    np.testing.assert_array_equal(back.sqp_iters, run.sqp_iters)
    assert back.crashed and back.crash_time == pytest.approx(run.crash_time)
    assert back.crashed_rows.tolist() == run.crashed_rows.tolist()


def test_crashed_column_marks_last_row(tmp_path, rng):
    lines = export_csv(random_log(rng, crashed=True), tmp_path / "c.csv").read_text().splitlines()
    flags = [line.rsplit(",", 1)[1] for line in lines[1:]]
    assert flags == ["0"] * 29 + ["1"]


def test_nine_significant_digits(tmp_path):
    run = synthetic_log(n=2)
    run.t = np.array([0.0, 1.0 / 3.0])
    text = export_csv(run, tmp_path / "d.csv").read_text().splitlines()
    assert text[2].startswith("0.333333333,")


def test_write_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ExportError, match="file"):
        export_csv(RunLog.empty(), blocker / "sub" / "log.csv")
    with pytest.raises(ExportError, match="missing.csv"):
        read_log_csv(tmp_path / "missing.csv")


def test_bad_header_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_log_csv(p)


def test_metrics_round_trip(tmp_path):
    rows = [compute_metrics(synthetic_log(offset=(0.1, 0, 0))), compute_metrics(synthetic_log(crashed=True))]
    path = export_metrics_csv(rows, tmp_path / "m.csv")
    back = read_metrics_csv(path)
    assert [m.scenario for m in back] == ["syn", "syn"]
    assert back[0].position_rmse == pytest.approx(0.1, rel=1e-8)
    assert not back[0].crashed and back[0].crash_time is None
    assert back[1].crashed and back[1].crash_time == pytest.approx(4.9)
