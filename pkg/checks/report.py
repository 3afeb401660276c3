# -*- coding: utf-8 -*-

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from geometry.area import DiskRegion
from geometry.needle import NeedleSpec
from geometry.scene import ObstacleScene
from indicator.classify import ProbeOptions
from indicator.reconstruct import GridSpec

STATUS_PASS = "PASS"
STATUS_FAIL = "FAIL"
STATUS_PREMISE = "PREMISE_NOT_REALIZED"
STATUS_ERROR = "ERROR"


@dataclass
class CheckThresholds:
    growth: float = 10.0
    decay: float = 0.2
    convergence_rel: float = 0.05
    identity_gap: float = 1e-3
    stability: float = 0.1
    divergence_factor: float = 10.0
    nullity: float = 1e-8
    separation: float = 0.2

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class TheoremReport:
    """一次校验的结果；passed 只由 statistics 与 thresholds 决定。"""
    check_id: str
    scenario: str
    statistics: Dict[str, float]
    thresholds: Dict[str, float]
    passed: bool
    status: str
    subject: str = ""
    message: str = ""
    tables: Dict[str, List[Dict[str, float]]] = field(default_factory=dict)

    @classmethod
    def from_verdict(cls, check_id: str, scenario: str, statistics: Dict[str, float], thresholds: Dict[str, float],
                     passed: bool, subject: str = "", tables=None) -> "TheoremReport":
        return cls(check_id, scenario, statistics, thresholds, bool(passed), STATUS_PASS if passed else STATUS_FAIL,
                   subject=subject, tables=tables or {})


@dataclass(frozen=True)
class Probe:
    """一个探测点：针尖、可选的针（默认直线针）和登记的紧集。"""
    name: str
    tip: Tuple[float, float]
    needle: Optional[NeedleSpec] = None
    compact_sets: Tuple[Tuple[str, DiskRegion], ...] = ()


@dataclass(frozen=True)
class Ray:
    """从 ∂D_component 上参数 t 处沿外法向出发的射线，在给定距离处取点。"""
    component: int
    t: float
    distances: Tuple[float, ...] = (0.2, 0.1, 0.05, 0.02)

    def points(self, scene: ObstacleScene) -> np.ndarray:
        boundary = scene.components[self.component - 1].boundary
        z, dz, _ = boundary.evaluate(np.array([self.t]))
        normal = np.array([dz[0, 1], -dz[0, 0]]) / np.hypot(dz[0, 0], dz[0, 1])
        return z[0][None, :] + np.asarray(self.distances)[:, None] * normal[None, :]


@dataclass
class Scenario:
    name: str
    scene: ObstacleScene
    M_outer: int = 256
    M_obstacle: int = 128
    condition_ceiling: float = 1e8
    tip_margin: float = 0.01
    options: ProbeOptions = field(default_factory=ProbeOptions)
    probes: Tuple[Probe, ...] = ()
    rays: Tuple[Ray, ...] = ()
    boundedness_grid: Optional[GridSpec] = None
    seed: int = 0
    thresholds: CheckThresholds = field(default_factory=CheckThresholds)
