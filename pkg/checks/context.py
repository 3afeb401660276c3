# -*- coding: utf-8 -*-

import functools
import logging
from typing import Dict

import numpy as np

from core.errors import CheckError
from core.solver import DtnSolver, build_solver
from geometry.needle import NeedleSpec, straight_needle
from geometry.scene import NeedleRelation, classify_needle_vs_obstacle
from indicator.direct import indicator_direct
from indicator.divergence import DivergenceStatus, detect_divergence
from indicator.series import IndicatorSeries, indicator_series
from needles.fitting import NeedleSequence, build_needle_sequence
from .report import Probe, Scenario

CROSSING_RELATIONS = (NeedleRelation.TIP_IN_OBSTACLE, NeedleRelation.CROSSES_OBSTACLE)


class ScenarioContext:
    """
    单个场景的计算缓存：求解器、每个探测点的针序列与指示序列只算一次，供各项校验共享。
    同一场景内的校验顺序执行，不需要加锁。
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self._sequences: Dict[str, NeedleSequence] = {}
        self._series: Dict[str, IndicatorSeries] = {}
        self._direct: Dict[str, float] = {}

    @property
    def scene(self):
        return self.scenario.scene

    @functools.cached_property
    def solver(self) -> DtnSolver:
        s = self.scenario
        return build_solver(s.scene, s.M_outer, s.M_obstacle, condition_ceiling=s.condition_ceiling,
                            tip_margin=s.tip_margin)

    @functools.cached_property
    def refined_solver(self) -> DtnSolver:
        """两倍分辨率的求解器，用于近边界点与加密收敛性检查。"""
        s = self.scenario
        logging.info(f"场景 {s.name}：构造加密求解器 (M_outer={2 * s.M_outer}, M_obstacle={2 * s.M_obstacle})。")
        return build_solver(s.scene, 2 * s.M_outer, 2 * s.M_obstacle, condition_ceiling=s.condition_ceiling,
                            tip_margin=s.tip_margin)

    def needle(self, probe: Probe) -> NeedleSpec:
        return probe.needle if probe.needle is not None else straight_needle(self.scene.outer, probe.tip)

    def relation(self, probe: Probe) -> NeedleRelation:
        return classify_needle_vs_obstacle(probe.tip, self.needle(probe), self.scene)

    def crossing_probes(self):
        return [p for p in self.scenario.probes if self.relation(p) in CROSSING_RELATIONS]

    def avoiding_probes(self):
        return [p for p in self.scenario.probes if self.relation(p) is NeedleRelation.AVOIDS]

    def sequence(self, probe: Probe) -> NeedleSequence:
        if probe.name not in self._sequences:
            options = self.scenario.options
            logging.info(f"场景 {self.scenario.name}：构造探测点 {probe.name} 的针序列。")
            self._sequences[probe.name] = build_needle_sequence(
                probe.tip, self.needle(probe), self.scene.outer, self.scene.k, options.schedule,
                center=options.center, spacing=options.spacing, compact_sets=dict(probe.compact_sets), strict=False,
                scene=self.scene)
        return self._sequences[probe.name]

    def series(self, probe: Probe) -> IndicatorSeries:
        if probe.name not in self._series:
            self._series[probe.name] = indicator_series(self.solver, self.sequence(probe), truth_known=True,
                                                        formulation=self.scenario.options.formulation,
                                                        needle_id=probe.name)
        return self._series[probe.name]

    def direct(self, probe: Probe) -> float:
        if probe.name not in self._direct:
            self._direct[probe.name] = indicator_direct(self.solver, probe.tip).value
        return self._direct[probe.name]

    def distance_to_obstacles(self, probe: Probe) -> float:
        return float(self.scene.distance_to_obstacles(np.asarray(probe.tip)[None, :])[0])

    def reference_amplitude(self) -> float:
        """远离障碍物且收敛的 |I| 的最大值（发散判据的参照幅值）。"""
        thresholds = self.scenario.options.thresholds
        values = []
        for probe in self.avoiding_probes():
            series = self.series(probe)
            status = detect_divergence(series.values, thresholds.window, thresholds.tau_rel, thresholds.g_min)
            if status is DivergenceStatus.CONVERGED:
                values.append(abs(series.values[-1]))
        if not values:
            values = [abs(self.direct(p)) for p in self.avoiding_probes()
                      if self.distance_to_obstacles(p) >= self.scenario.thresholds.separation]
        if not values:
            raise CheckError(f"场景 {self.scenario.name} 没有可作参照的避开障碍物的探测点。")
        return float(max(values))
