from __future__ import annotations

import numpy as np
import pytest
import yaml

from trqftc.harness.config import (
    ConfigError,
    build_scenario,
    builtin_config,
    builtin_config_text,
    load_config,
    parse_config,
    preset_names,
)


def one(entry, defaults=None):
    doc = {"scenarios": [dict(entry)]}
    if defaults:
        doc["defaults"] = defaults
    return parse_config(doc).scenarios[0]


def test_builtin_config():
    cfg = builtin_config()
    names = cfg.names()
    assert names[:3] == ["circle-fault50", "circle-fault-sine", "circle-no-fault"]
    s = cfg.select("circle-fault50")[0]
    assert s.controller == "trq_eso_nmpc" and s.duration == 30
    assert s.fault.kind == "constant_effectiveness" and s.fault.start_time == 5.0
    assert s.wind.force_magnitude == 2.0
    assert (s.trajectory.kind, s.trajectory.radius, s.trajectory.period) == ("circle", 2.0, 20.0)
    assert yaml.safe_load(builtin_config_text())["seed"] == 0


def test_minimal_entry_defaults():
    s = one({"name": "a"})
    assert s.fault.kind == "none" and s.wind.force_magnitude == 0.0
    assert s.control_dt == 0.1 and s.sim_dt == 0.001
    assert s.ocp.horizon == 10
    assert s.eso.beta1 == 600.0


def test_overrides_reach_every_section():
    s = one(
        {
            "name": "b",
            "controller": "quad_nmpc",
            "disturbance": "fault50",
            "fault": {"lambda_const": 0.7, "motor_index": 2},
            "wind": {"direction": [0, 1, 0]},
            "vehicle": {"mass": 2.5},
            "geometry": {"spin_dirs": [-1, 1, -1, 1]},
            "ocp": {"horizon": 5, "Q": [1.0] * 12, "max_sqp_iters": 3},
            "eso": {"omega_o": 50.0},
            "crash_bounds": {"attitude_limit": 1.2},
            "trajectory": {"kind": "waypoints", "waypoints": [[0, 0, 1], [1, 1, 1]]},
            "duration": 3,
            "initial_offset": 0.1,
        }
    )
    assert s.controller == "quad_nmpc"
    assert s.fault.kind == "constant_effectiveness" and s.fault.lambda_const == 0.7 and s.fault.motor_index == 2
    assert s.wind.force_magnitude == 2.0 and s.wind.direction == (0.0, 1.0, 0.0)
    assert s.params.mass == 2.5
    np.testing.assert_array_equal(s.geometry.spin_dirs, [-1, 1, -1, 1])
    assert s.ocp.horizon == 5 and s.ocp.max_sqp_iters == 3
    np.testing.assert_array_equal(s.ocp.Q, 1.0)
    assert (s.eso.beta1, s.eso.beta2, s.eso.beta3) == (150.0, 7500.0, 125000.0)
    assert s.crash_bounds.attitude_limit == 1.2
    assert s.trajectory.waypoints == ((0.0, 0.0, 1.0), (1.0, 1.0, 1.0))
    assert s.initial_offset == 0.1


def test_defaults_merge_nested():
    s = one({"name": "c", "trajectory": {"radius": 3.0}}, defaults={"trajectory": {"kind": "figure_eight"}})
    assert s.trajectory.kind == "figure_eight" and s.trajectory.radius == 3.0


def test_explicit_eso_gains():
    s = one({"name": "d", "eso": {"beta1": 30, "beta2": 300, "beta3": 1000, "alpha2": 0.5}})
    assert (s.eso.beta1, s.eso.alpha2, s.eso.alpha1) == (30, 0.5, 0.9)


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({"scenarios": [{"name": "a", "colour": 1}]}, "colour"),
        ({"scenarios": [{"name": "a", "ocp": {"horizn": 5}}]}, "scenarios[0].ocp"),
        ({"scenarios": [{"name": "a", "eso": {"omega_o": 10, "beta1": 3}}]}, "not both"),
        ({"scenarios": [{"name": "a", "disturbance": "fault99"}]}, "fault99"),
        ({"scenarios": [{"name": "a", "controller": "pid"}]}, "controller"),
        ({"scenarios": [{"name": "a", "ocp": {"horizon": 0}}]}, "horizon"),
        ({"scenarios": [{"controller": "trq_nmpc"}]}, "needs a name"),
        ({"scenarios": [{"name": "a"}, {"name": "a"}]}, "duplicate"),
        ({"scenarios": []}, "nonempty"),
        ({"scenarios": [{"name": "a"}], "seed": "x"}, "seed"),
        ({"scenarios": [{"name": "a"}], "extra": 1}, "extra"),
        ({"defaults": {"bogus": 1}, "scenarios": [{"name": "a"}]}, "defaults"),
        ({"scenarios": ["a"]}, "mapping"),
        ([1, 2], "mapping"),
    ],
)
def test_invalid_configs(doc, fragment):
    with pytest.raises(ConfigError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        parse_config(doc)


def test_select_unknown_lists_names():
    with pytest.raises(ConfigError, match="circle-fault50"):
        builtin_config().select("nope")


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "none.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("scenarios: [\n")
    with pytest.raises(ConfigError, match="invalid YAML"):
        load_config(bad)
    wrong = tmp_path / "wrong.yaml"
    wrong.write_text("scenarios:\n  - name: a\n    speed: 3\n")
    with pytest.raises(ConfigError, match="wrong.yaml"):
        load_config(wrong)


def test_load_config_file(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("seed: 7\nscenarios:\n  - name: h\n    trajectory: {kind: hover}\n")
    cfg = load_config(p)
    assert cfg.seed == 7 and cfg.names() == ["h"]


def test_build_scenario_direct():
    assert build_scenario({"name": "z", "duration": 2}).duration == 2
    assert preset_names() == ["fault-sine", "fault50", "no-fault"]
