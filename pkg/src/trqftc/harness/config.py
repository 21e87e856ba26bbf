"""YAML scenario configuration.

A config file has up to three top-level keys::

    seed: 0              # drives the optional random initial offset
    defaults: {...}      # scenario fields shared by every entry
    scenarios:           # list of scenario mappings, each with a name
      - name: circle-fault50
        disturbance: fault50
        duration: 30

Scenario fields are ``controller``, ``trajectory``, ``disturbance`` (a
fault/wind preset name), ``fault``, ``wind``, ``duration``,
``control_dt``, ``sim_dt``, ``vehicle``, ``geometry``, ``ocp``, ``eso``,
``crash_bounds`` and ``initial_offset``. Nested sections take the field
names of the matching dataclass; ``fault`` and ``wind`` entries override
the preset picked by ``disturbance``. Unknown keys anywhere are errors.
"""

from __future__ import annotations

import copy
from dataclasses import asdict, dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from ..allocation import RotorGeometry, input_bounds
from ..eso import EsoGains
from ..faults import FaultSpec, WindSpec, preset, presets
from ..nmpc import OcpConfig
from ..vehicle import VehicleParams
from .reference import Trajectory
from .scenario import CrashBounds, Scenario

TOP_KEYS = ("seed", "defaults", "scenarios")
SCENARIO_KEYS = (
    "name",
    "controller",
    "trajectory",
    "disturbance",
    "fault",
    "wind",
    "duration",
    "control_dt",
    "sim_dt",
    "vehicle",
    "geometry",
    "ocp",
    "eso",
    "crash_bounds",
    "initial_offset",
)
ESO_KEYS = ("omega_o", "alphas", "beta1", "beta2", "beta3", "alpha1", "alpha2", "alpha3")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending entry."""


@dataclass
class Config:
    seed: int
    scenarios: list[Scenario]

    def names(self) -> list[str]:
        return [s.name for s in self.scenarios]

    def select(self, name: str | None) -> list[Scenario]:
        if name is None:
            return list(self.scenarios)
        chosen = [s for s in self.scenarios if s.name == name]
        if not chosen:
            raise ConfigError(f"no scenario named {name!r}; available: {', '.join(self.names())}")
        return chosen


def _check_keys(section: Any, allowed, where: str) -> dict:
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(section).__name__}")
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(map(str, unknown))}")
    return section


def _field_names(cls) -> tuple[str, ...]:
    return tuple(f.name for f in fields(cls))


def _build(cls, section, where: str, base: dict | None = None):
    data = dict(base or {})
    data.update(_check_keys(section, _field_names(cls), where))
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _trajectory(section, where: str) -> Trajectory:
    section = dict(_check_keys(section, _field_names(Trajectory), where))
    if "waypoints" in section:
        section["waypoints"] = tuple(tuple(p) for p in section["waypoints"])
    return _build(Trajectory, section, where)


def _geometry(section, params: VehicleParams, where: str) -> RotorGeometry:
    if not section:
        return RotorGeometry.x_config(params.arm_length)
    base = {k: v.tolist() for k, v in asdict(RotorGeometry.x_config(params.arm_length)).items()}
    return _build(RotorGeometry, section, where, base)


def _eso(section, where: str) -> EsoGains:
    section = _check_keys(section, ESO_KEYS, where)
    explicit = {k: v for k, v in section.items() if k not in ("omega_o", "alphas")}
    if "omega_o" in section or "alphas" in section:
        if any(k.startswith("beta") for k in explicit):
            raise ConfigError(f"{where}: give either omega_o or beta1..beta3, not both")
        try:
            base = EsoGains.bandwidth(
                float(section.get("omega_o", 200.0)), tuple(section.get("alphas", (0.9, 0.8, 0.7)))
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: {exc}") from exc
        return _build(EsoGains, explicit, where, asdict(base))
    return _build(EsoGains, explicit, where)


def _ocp(section, params: VehicleParams, where: str) -> OcpConfig:
    lo, hi = input_bounds(params)
    base = {"input_lower": lo, "input_upper": hi}
    return _build(OcpConfig, section, where, base)


def _disturbance(entry: dict, where: str) -> tuple[FaultSpec, WindSpec]:
    name = entry.get("disturbance")
    fault_base: dict = {}
    wind_base: dict = {"force_magnitude": 0.0}
    if name is not None:
        try:
            p = preset(str(name))
        except KeyError as exc:
            raise ConfigError(f"{where}.disturbance: {exc.args[0]}") from exc
        fault_base, wind_base = asdict(p.fault), asdict(p.wind)
    fault = _build(FaultSpec, entry.get("fault"), f"{where}.fault", fault_base)
    wind = _build(WindSpec, entry.get("wind"), f"{where}.wind", wind_base)
    return fault, wind


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def build_scenario(entry: dict, where: str = "scenario") -> Scenario:
    """Build one :class:`Scenario` from a mapping of scenario fields."""
    entry = _check_keys(entry, SCENARIO_KEYS, where)
    if "name" not in entry:
        raise ConfigError(f"{where} needs a name")
    params = _build(VehicleParams, entry.get("vehicle"), f"{where}.vehicle")
    fault, wind = _disturbance(entry, where)
    kwargs = {
        "name": str(entry["name"]),
        "trajectory": _trajectory(entry.get("trajectory"), f"{where}.trajectory"),
        "fault": fault,
        "wind": wind,
        "params": params,
        "geometry": _geometry(entry.get("geometry"), params, f"{where}.geometry"),
        "ocp": _ocp(entry.get("ocp"), params, f"{where}.ocp"),
        "eso": _eso(entry.get("eso"), f"{where}.eso"),
        "crash_bounds": _build(CrashBounds, entry.get("crash_bounds"), f"{where}.crash_bounds"),
    }
    for key in ("controller", "duration", "control_dt", "sim_dt", "initial_offset"):
        if key in entry:
            kwargs[key] = entry[key]
    try:
        return Scenario(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_config(data: Any) -> Config:
    """Validate a parsed YAML document and build its scenarios."""
    data = _check_keys(data, TOP_KEYS, "config")
    defaults = _check_keys(data.get("defaults"), SCENARIO_KEYS, "defaults")
    entries = data.get("scenarios")
    if not isinstance(entries, list) or not entries:
        raise ConfigError("config needs a nonempty 'scenarios' list")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    scenarios = []
    for i, entry in enumerate(entries):
        where = f"scenarios[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where} must be a mapping")
        scenarios.append(build_scenario(_merge(defaults, entry), where))
    names = [s.name for s in scenarios]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ConfigError(f"duplicate scenario name(s): {', '.join(dupes)}")
    return Config(seed=seed, scenarios=scenarios)


def load_config(path) -> Config:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    try:
        return parse_config(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def builtin_config_text() -> str:
    return resources.files("trqftc.harness").joinpath("scenarios.yaml").read_text()


def builtin_config() -> Config:
    """The scenario set shipped with the package."""
    return parse_config(yaml.safe_load(builtin_config_text()))


def preset_names() -> list[str]:
    return sorted(presets())


__all__ = [
    "Config",
    "ConfigError",
    "build_scenario",
    "builtin_config",
    "builtin_config_text",
    "load_config",
    "parse_config",
    "preset_names",
]
