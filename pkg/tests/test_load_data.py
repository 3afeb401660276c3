# -*- coding: utf-8 -*-

import dataclasses
import json
import os

import pytest

from core.errors import ConfigError, GeometryError
from core.load_data import (
    RunConfig, config_to_dict, load_run_config, load_scenario_pack, parse_run_config, resolve_run_config,
)
from core.process_data import process_data
from tests.conftest import ROOT

SCENARIO_DIR = os.path.join(ROOT, "data", "scenarios")


def write_config(tmp_path, data, name="settings.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_default_config_round_trip():
    config = RunConfig()
    assert parse_run_config(config_to_dict(config)) == config


def test_settings_file_round_trip():
    config = load_run_config(os.path.join(ROOT, "config", "settings.json"))
    assert parse_run_config(config_to_dict(config)) == config
    assert len(config.scene.components) == 2
    assert config.scene.boundary_condition == "impedance"


def test_unknown_key_names_dotted_path():
    with pytest.raises(ConfigError) as info:
        parse_run_config({"solver": {"M_outer": 64, "M_inner": 32}})
    assert info.value.field == "solver.M_inner"
    with pytest.raises(ConfigError) as info:
        parse_run_config({"colour": 1})
    assert info.value.field == "colour"


def test_negative_radius_names_field():
    raw = config_to_dict(RunConfig())
    raw["scene"]["obstacles"][0]["curve"]["radius"] = -0.4
    with pytest.raises(ConfigError) as info:
        parse_run_config(raw)
    assert info.value.field == "scene.obstacles[0].curve.radius"


@pytest.mark.parametrize("section, key, value", [
    ("solver", "M_outer", 63),
    ("solver", "M_obstacle", 8),
    ("run_config", "mode", "draw"),
    ("run_config", "threads", 0),
    ("indicator", "formulation", "volume"),
    ("grid", "h", -0.1),
    ("indicator", "front_threshold", "big"),
    ("indicator", "front_threshold", True),
    ("fitting", "center", "origin"),
    ("fitting", "center", [0.0]),
    ("run_config", "log_level", 10),
])
def test_invalid_values_are_rejected(section, key, value):
    with pytest.raises(ConfigError) as info:
        parse_run_config({section: {key: value}})
    assert info.value.field.startswith(section)


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(str(tmp_path / "absent.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_run_config(str(broken))


def test_override_precedence(tmp_path):
    path = write_config(tmp_path, {"run_config": {"mode": "needle-fit", "seed": 3, "output_dir": "file_out"}})
    environ = {"PROBE_CONFIG": path, "PROBE_SEED": "5", "PROBE_MODE": "forward-check"}
    config = resolve_run_config({"config": None, "out": None, "threads": None, "seed": 7, "mode": None}, environ)
    assert config.run_config.seed == 7
    assert config.run_config.mode == "forward-check"
    assert config.run_config.output_dir == "file_out"

    config = resolve_run_config({"config": path}, {})
    assert config.run_config.seed == 3
    assert config.run_config.mode == "needle-fit"


def test_bad_environment_value(tmp_path):
    path = write_config(tmp_path, {})
    with pytest.raises(ConfigError) as info:
        resolve_run_config({"config": path}, {"PROBE_THREADS": "many"})
    assert info.value.field == "run_config.threads"


@pytest.mark.parametrize("name", ["concentric.json", "two_disks.json", "empty.json", "kite.json"])
def test_scenario_packs_load(name):
    scenarios = load_scenario_pack(os.path.join(SCENARIO_DIR, name))
    assert scenarios
    for scenario in scenarios:
        scenario.scene.validate()
        assert scenario.probes
        assert len(scenario.options.schedule) == 10


def test_scenario_unknown_key(tmp_path):
    path = write_config(tmp_path, {"scenarios": [{"name": "s", "scene": {"domain": {"kind": "circle"}},
                                                  "thresholds": {}}]}, "pack.json")
    with pytest.raises(ConfigError) as info:
        load_scenario_pack(path)
    assert info.value.field.endswith("scenarios[0].thresholds")


def test_process_data_builds_inputs():
    config = load_run_config(os.path.join(ROOT, "config", "settings.json"))
    config = dataclasses.replace(config, run_config=dataclasses.replace(config.run_config, mode="indicator-series"))
    data = process_data(config)
    assert len(data.schedule) == config.needle_schedule.n_max
    assert data.options.thresholds.window == config.indicator.window
    assert data.needle.tip.tolist() == list(config.probe.tip)
    assert set(data.compact_sets) == {c.name for c in config.probe.compact_sets}


@pytest.mark.parametrize("mode", ["needle-fit", "indicator-series"])
def test_process_data_rejects_grazing_needle(mode):
    config = load_run_config(os.path.join(ROOT, "config", "settings.json"))
    config = dataclasses.replace(config, run_config=dataclasses.replace(config.run_config, mode=mode),
                                 probe=dataclasses.replace(config.probe, tip=(0.1, 0.0)))
    with pytest.raises(GeometryError, match="grazing"):
        process_data(config)


def test_optional_fields_accept_null_and_values():
    config = parse_run_config({"indicator": {"front_threshold": 2}, "fitting": {"center": None}})
    assert config.indicator.front_threshold == 2.0
    assert config.fitting.center is None
    config = parse_run_config({"fitting": {"center": [0.1, -0.2]}})
    assert config.fitting.center == (0.1, -0.2)


def test_string_false_is_not_a_flag():
    raw = config_to_dict(RunConfig())
    raw["scene"]["allow_real_impedance"] = "false"
    with pytest.raises(ConfigError) as info:
        parse_run_config(raw)
    assert info.value.field == "scene.allow_real_impedance"
