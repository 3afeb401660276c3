# -*- coding: utf-8 -*-

import json
import os

import pytest

from core.errors import (
    CheckError, ConfigError, GeometryError, IllConditioned, RankDeficient, ScheduleTooAggressive, TipTooClose,
)
from main import build_parser, exit_code_for, main


@pytest.mark.parametrize("error, code", [
    (ConfigError("bad"), 2),
    (IllConditioned(1e9, 1e8), 3),
    (TipTooClose(0.001, 0.01), 3),
    (RankDeficient("few points"), 4),
    (ScheduleTooAggressive("growth", 3), 4),
    (GeometryError("grazing needle"), 5),
    (CheckError("other"), 1),
    (RuntimeError("boom"), 1),
])
def test_exit_code_mapping(error, code):
    assert exit_code_for(error) == code


def test_bad_config_exits_with_two(tmp_path):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"solver": {"M_outer": 15}}), encoding="utf-8")
    assert main(["--config", str(path), "--out", str(tmp_path / "out")]) == 2


def test_missing_config_exits_with_two(tmp_path):
    assert main(["--config", str(tmp_path / "absent.json")]) == 2


def test_invalid_scene_exits_with_five(tmp_path):
    scene = {"domain": {"kind": "circle", "radius": 1.0}, "boundary_condition": "sound_soft", "k": 2.0,
             "obstacles": [{"curve": {"kind": "circle", "center": [0.9, 0.0], "radius": 0.3}}]}
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"scene": scene, "run_config": {"mode": "forward-check"}}), encoding="utf-8")
    assert main(["--config", str(path), "--out", str(tmp_path / "out")]) == 5


def test_grazing_needle_exits_with_five(tmp_path):
    # 直线针 (1,0)→(0.1,0) 与圆心 (0.35,-0.2)、半径 0.2 的障碍物相切
    scene = {"domain": {"kind": "circle", "radius": 1.0}, "boundary_condition": "impedance", "k": 2.0,
             "obstacles": [{"curve": {"kind": "circle", "center": [0.35, -0.2], "radius": 0.2},
                            "impedance": {"constant": [1.0, 1.0]}}]}
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"scene": scene, "probe": {"tip": [0.1, 0.0]},
                                "run_config": {"mode": "needle-fit"}}), encoding="utf-8")
    assert main(["--config", str(path), "--out", str(tmp_path / "out")]) == 5


def test_help_epilog_shows_defaults():
    epilog = build_parser().epilog
    assert '"M_outer": 256' in epilog
    assert '"mode": "side-b-field"' in epilog


@pytest.mark.slow
def test_forward_check_end_to_end(tmp_path):
    scene = {"domain": {"kind": "circle", "radius": 1.0}, "boundary_condition": "sound_soft", "k": 2.0,
             "obstacles": [{"curve": {"kind": "circle", "radius": 0.4}}]}
    config = {"scene": scene, "run_config": {"mode": "forward-check", "threads": 1},
              "solver": {"M_outer": 128, "M_obstacle": 64}}
    path = tmp_path / "settings.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    out = tmp_path / "out"
    assert main(["--config", str(path), "--out", str(out)]) == 0
    assert sorted(os.listdir(out)) == ["effective_config.json", "forward_check.csv", "manifest.txt"]
    rows = (out / "forward_check.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "case,reference,rel_error,max_boundary_residual,condition"
    assert all(",oracle," in row for row in rows[1:])
