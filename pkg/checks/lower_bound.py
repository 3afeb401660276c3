# -*- coding: utf-8 -*-

"""
下界常数的估计：在序列后半段上最小二乘拟合 I_n ≈ c1·‖∇v_n‖²_{L²(D)} + c2·‖v_n‖²_{L²(D)}。
拟合结果只作为证据（常数本身不可构造），阻抗场景看 c1 > 0，声软场景看 c1 < 0。
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core.errors import CheckError, DegenerateRegression
from indicator.series import IndicatorSeries
from .context import ScenarioContext
from .report import Probe, TheoremReport

# 设计矩阵相对秩判定阈值
RANK_TOLERANCE = 1e-12


@dataclass
class FittedBound:
    c1: float
    c2: float
    residual: float
    rank: int
    consistent: bool


def fit_lower_bound(values: Sequence[float], grad_energy: Sequence[float], l2_energy: Sequence[float],
                    boundary_condition: str) -> FittedBound:
    """
    Args:
        values: I_n。
        grad_energy: ‖∇v_n‖²_{L²(D)}。
        l2_energy: ‖v_n‖²_{L²(D)}。

    Raises:
        DegenerateRegression: 后半段的设计矩阵秩 < 2。
    """
    values = np.asarray(values, dtype=float)
    start = len(values) // 2
    design = np.column_stack([np.asarray(grad_energy, dtype=float)[start:], np.asarray(l2_energy, dtype=float)[start:]])
    target = values[start:]
    # 列缩放后再判秩，避免两列量级悬殊时误判
    scale = np.linalg.norm(design, axis=0)
    if np.any(scale == 0):
        raise DegenerateRegression("设计矩阵有全零列。")
    scaled = design / scale
    rank = int(np.linalg.matrix_rank(scaled, tol=RANK_TOLERANCE * max(scaled.shape)))
    if rank < 2:
        raise DegenerateRegression(f"设计矩阵秩为 {rank}，无法同时估计 c1 与 c2。")
    solution, *_ = np.linalg.lstsq(scaled, target, rcond=None)
    c1, c2 = solution / scale
    residual = float(np.linalg.norm(design @ np.array([c1, c2]) - target))
    consistent = c1 > 0 if boundary_condition == "impedance" else c1 < 0
    return FittedBound(float(c1), float(c2), residual, rank, bool(consistent))


def estimate_lower_bound(series: IndicatorSeries, boundary_condition: str) -> FittedBound:
    """
    Raises:
        CheckError: 序列没有 D 上的伴随量（真实场景未知）。
        DegenerateRegression: 设计矩阵秩亏。
    """
    if not series.has_companions:
        raise CheckError("下界拟合需要 D 上的能量伴随量，当前序列没有（真实场景未知）。")
    l2_energy = np.asarray(series.l2_D, dtype=float) ** 2
    return fit_lower_bound(series.values, series.grad_energy_D, l2_energy, boundary_condition)


def check_lower_bound_fit(ctx: ScenarioContext, probe: Probe) -> TheoremReport:
    series = ctx.series(probe)
    bc = ctx.scene.boundary_condition
    bound = estimate_lower_bound(series, bc)
    statistics = {"c1": bound.c1, "c2": bound.c2, "residual": bound.residual, "rank": bound.rank,
                  "c1_sign_expected": "positive" if bc == "impedance" else "negative"}
    return TheoremReport.from_verdict("lower_bound_fit", ctx.scenario.name, statistics, {}, bound.consistent,
                                      probe.name)
