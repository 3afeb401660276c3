# -*- coding: utf-8 -*-

import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.errors import GeometryError
from core.solver import DtnSolver
from geometry.needle import NeedleSpec, straight_needle, validate_needle
from needles.fitting import DEFAULT_SPACING, build_needle_sequence
from needles.schedule import ScheduleStep, default_schedule
from .divergence import DivergenceStatus, DivergenceThresholds, detect_divergence, growth_statistics
from .series import IndicatorSeries, indicator_series


class Classification(enum.Enum):
    IN_OBSTACLE_CLOSURE = "InObstacleClosure"
    OUTSIDE = "Outside"


@dataclass
class NeedlePolicy:
    """针的选择策略：默认从最近的 ∂Ω 点到 x 的直线段，外加尖端恰为 x 的用户绕行针。"""
    detours: Tuple[NeedleSpec, ...] = ()
    use_straight: bool = True

    def needles(self, outer, x) -> List[Tuple[str, NeedleSpec]]:
        x = np.asarray(x, dtype=float)
        chosen = []
        if self.use_straight:
            chosen.append(("straight", straight_needle(outer, x)))
        for i, detour in enumerate(self.detours):
            if np.allclose(detour.tip, x, rtol=0, atol=1e-12):
                chosen.append((f"detour_{i}", detour))
        return chosen


@dataclass
class ProbeOptions:
    """针序列与趋势判定的公共参数。"""
    schedule: List[ScheduleStep] = field(default_factory=default_schedule)
    center: Optional[Tuple[float, float]] = None
    spacing: float = DEFAULT_SPACING
    thresholds: DivergenceThresholds = field(default_factory=DivergenceThresholds)
    formulation: str = "direct"


@dataclass
class Verdict:
    classification: Classification
    confidence: str
    status: DivergenceStatus
    value: float
    evidence: List[Dict[str, object]] = field(default_factory=list)
    series: Dict[str, IndicatorSeries] = field(default_factory=dict)


def probe_series(solver: DtnSolver, x, needle: NeedleSpec, options: ProbeOptions, needle_id: str = "straight",
                 truth_known: bool = False) -> IndicatorSeries:
    """为一根针构造针序列（截断模式）并计算指示序列。"""
    seq = build_needle_sequence(x, needle, solver.scene.outer, solver.k, options.schedule, center=options.center,
                                spacing=options.spacing, strict=False)
    return indicator_series(solver, seq, truth_known=truth_known, formulation=options.formulation,
                            needle_id=needle_id)


def classify_point(solver: DtnSolver, x, policy: Optional[NeedlePolicy] = None,
                   options: Optional[ProbeOptions] = None) -> Verdict:
    """
    用指示序列的收敛/发散判定 x 是否在 D̄ 内。

    任一针收敛即判为 Outside；没有针收敛而至少一根发散判为 InObstacleClosure；
    否则判为 Outside 并标记低置信度。

    Raises:
        GeometryError: x 不在 Ω 内，或策略给出的针全部不合法（包括擦边针）。
    """
    policy = policy or NeedlePolicy()
    options = options or ProbeOptions()
    x = np.asarray(x, dtype=float)
    outer = solver.scene.outer
    if not outer.contains(x[None, :])[0]:
        raise GeometryError(f"点 {x.tolist()} 不在 Ω 内。")
    thresholds = options.thresholds
    evidence = []
    results = {}
    for needle_id, needle in policy.needles(outer, x):
        check = validate_needle(needle, outer, solver.scene)
        if not check.ok:
            evidence.append({"needle": needle_id, "status": "Rejected", "violation": check.violation})
            logging.warning(f"针 {needle_id} 被拒绝: {check.violation}")
            continue
        series = probe_series(solver, x, needle, options, needle_id)
        status = detect_divergence(series.values, thresholds.window, thresholds.tau_rel, thresholds.g_min,
                                   thresholds.a_min)
        item = {"needle": needle_id, "status": status.value, "length": len(series)}
        if len(series) >= thresholds.window:
            item.update(growth_statistics(series.values, thresholds.window))
        evidence.append(item)
        results[needle_id] = (status, series)
    if not results:
        raise GeometryError(f"点 {x.tolist()} 没有可用的针（全部被拒绝）。")

    series_map = {key: s for key, (_, s) in results.items()}
    for wanted in (DivergenceStatus.CONVERGED, DivergenceStatus.DIVERGING_POS, DivergenceStatus.DIVERGING_NEG):
        for needle_id, (status, series) in results.items():
            if status is wanted:
                classification = (Classification.OUTSIDE if wanted is DivergenceStatus.CONVERGED
                                  else Classification.IN_OBSTACLE_CLOSURE)
                return Verdict(classification, "high", status, _last(series), evidence, series_map)
    needle_id, (status, series) = next(iter(results.items()))
    logging.warning(f"点 ({x[0]:.4f}, {x[1]:.4f}) 的指示序列趋势不明，按 Outside（低置信度）处理。")
    return Verdict(Classification.OUTSIDE, "low", status, _last(series), evidence, series_map)


def _last(series: IndicatorSeries) -> float:
    return series.values[-1] if series.values else float("nan")
