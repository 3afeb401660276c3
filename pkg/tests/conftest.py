# -*- coding: utf-8 -*-

import os
import sys

import numpy as np
import pytest

# 测试直接导入仓库根目录下的各个包（与 main.py 的运行方式一致）
ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from core.solver import build_solver  # noqa: E402
from geometry.curves import CurveSpec  # noqa: E402
from geometry.scene import Component, Impedance, ObstacleScene  # noqa: E402

UNIT_DISK = CurveSpec(kind="circle", radius=1.0)
RHO = 0.4
LAMBDA = 1 + 1j


def concentric_scene(boundary_condition: str = "impedance", k: float = 2.0) -> ObstacleScene:
    impedance = Impedance(constant=LAMBDA) if boundary_condition == "impedance" else None
    return ObstacleScene(
        outer=UNIT_DISK,
        components=(Component(curve=CurveSpec(kind="circle", radius=RHO), impedance=impedance),),
        boundary_condition=boundary_condition, k=k,
    )


def two_disk_scene(k: float = 2.0) -> ObstacleScene:
    return ObstacleScene(
        outer=UNIT_DISK,
        components=(
            Component(curve=CurveSpec(kind="circle", center=(-0.35, 0.2), radius=0.2), impedance=Impedance(LAMBDA)),
            Component(curve=CurveSpec(kind="circle", center=(0.35, -0.2), radius=0.2), impedance=Impedance(LAMBDA)),
        ),
        boundary_condition="impedance", k=k,
    )


def empty_scene(k: float = 2.0) -> ObstacleScene:
    return ObstacleScene(outer=UNIT_DISK, components=(), boundary_condition="sound_soft", k=k)


@pytest.fixture(scope="session")
def impedance_solver():
    return build_solver(concentric_scene("impedance"), 256, 128)


@pytest.fixture(scope="session")
def sound_soft_solver():
    return build_solver(concentric_scene("sound_soft"), 256, 128)


@pytest.fixture(scope="session")
def empty_solver():
    return build_solver(empty_scene(), 128, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
