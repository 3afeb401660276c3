# -*- coding: utf-8 -*-

"""
针与障碍物相交时（Side B）的发散校验：阻抗场景 I_n → +∞，声软场景 I_n → -∞。
"""

import numpy as np

from core.errors import PremiseNotRealized
from .context import ScenarioContext
from .report import Probe, TheoremReport


def divergence_check_id(boundary_condition: str) -> str:
    return "impedance_divergence" if boundary_condition == "impedance" else "sound_soft_divergence"


def check_divergence(ctx: ScenarioContext, probe: Probe) -> TheoremReport:
    """
    后半段 I_n 单调（阻抗递增、声软递减），且末项 >= divergence_factor × 参照幅值（声软取负号）。
    参照幅值为远离障碍物且收敛的 |I| 的最大值。

    Raises:
        PremiseNotRealized: 场景没有障碍物。
    """
    thresholds = ctx.scenario.thresholds
    if ctx.scene.is_empty:
        raise PremiseNotRealized(0.0, thresholds.growth)
    impedance = ctx.scene.boundary_condition == "impedance"
    series = ctx.series(probe)
    values = np.asarray(series.values)
    reference = ctx.reference_amplitude()
    tail = np.diff(values[len(values) // 2:])
    monotone = bool(np.all(tail > 0)) if impedance else bool(np.all(tail < 0))
    bound = thresholds.divergence_factor * reference
    large = values[-1] >= bound if impedance else values[-1] <= -bound
    statistics = {"I_last": float(values[-1]), "reference": reference, "monotone_tail": monotone,
                  "relation": ctx.relation(probe).value}
    table = [{"n": n, "I_n": float(value)} for n, value in enumerate(values)]
    if not impedance and series.boundary_ratio is not None:
        # 边界迹比值 ‖v_n‖_{L²(∂D)} / ‖∇v_n‖_{L²(D)} 的趋势，只作诊断
        statistics["boundary_ratio_first"] = float(series.boundary_ratio[0])
        statistics["boundary_ratio_last"] = float(series.boundary_ratio[-1])
        for row, ratio in zip(table, series.boundary_ratio):
            row["boundary_ratio"] = float(ratio)
    check_id = divergence_check_id(ctx.scene.boundary_condition)
    return TheoremReport.from_verdict(check_id, ctx.scenario.name, statistics,
                                      {"divergence_factor": thresholds.divergence_factor},
                                      monotone and bool(large), probe.name, {check_id: table})
