# -*- coding: utf-8 -*-

"""
针避开障碍物时（Side A）的校验：指示序列收敛到 I(x)、I(x) 在远离 D 处有界且对网格加密稳定、
沿障碍物法向射线 I(x) 单调爆破。
"""

import dataclasses
import logging

import numpy as np

from core.errors import CheckError, PremiseNotRealized
from indicator.direct import indicator_direct
from indicator.reconstruct import GridSpec
from .context import ScenarioContext
from .report import Probe, Ray, TheoremReport


def check_side_a_convergence(ctx: ScenarioContext, probe: Probe) -> TheoremReport:
    """|I_{n_max} - I(x)| <= convergence_rel·|I(x)|，只用于与障碍物距离 >= separation 的避开针。"""
    thresholds = ctx.scenario.thresholds
    distance = ctx.distance_to_obstacles(probe)
    if distance < thresholds.separation:
        raise CheckError(f"探测点 {probe.name} 到障碍物的距离 {distance:.3f} 小于 {thresholds.separation}。")
    series = ctx.series(probe)
    direct = ctx.direct(probe)
    last = series.values[-1]
    error = abs(last - direct)
    statistics = {"I_last": last, "I_direct": direct, "abs_error": error,
                  "rel_error": error / abs(direct) if direct != 0 else float("inf"), "distance": distance}
    table = [{"n": n, "I_n": value, "I_direct": direct} for n, value in enumerate(series.values)]
    return TheoremReport.from_verdict("side_a_convergence", ctx.scenario.name, statistics,
                                      {"convergence_rel": thresholds.convergence_rel},
                                      error <= thresholds.convergence_rel * abs(direct), probe.name,
                                      {"side_a_convergence": table})


def _far_points(ctx: ScenarioContext, grid: GridSpec) -> np.ndarray:
    points = grid.points()
    scene = ctx.scene
    keep = scene.in_domain(points) & (scene.distance_to_obstacles(points) > ctx.scenario.thresholds.separation)
    return points[keep]


def _sup_indicator(ctx: ScenarioContext, grid: GridSpec) -> float:
    points = _far_points(ctx, grid)
    if points.shape[0] == 0:
        raise CheckError(f"网格 h={grid.h} 上没有远离障碍物的点。")
    values = [abs(indicator_direct(ctx.solver, x).value) for x in points]
    return float(max(values))


def check_side_a_boundedness(ctx: ScenarioContext) -> TheoremReport:
    """远离 D 的网格点上 sup|I(x)| 有限，且网格步长减半时变化不超过 stability。"""
    grid = ctx.scenario.boundedness_grid
    thresholds = ctx.scenario.thresholds
    if grid is None:
        raise CheckError(f"场景 {ctx.scenario.name} 没有配置有界性检查网格。")
    coarse = _sup_indicator(ctx, grid)
    fine = _sup_indicator(ctx, dataclasses.replace(grid, h=0.5 * grid.h))
    change = abs(fine - coarse) / coarse if coarse > 0 else 0.0
    logging.info(f"场景 {ctx.scenario.name}：sup|I| 在 h={grid.h} 时为 {coarse:.6e}，h/2 时为 {fine:.6e}。")
    statistics = {"sup_h": coarse, "sup_h_half": fine, "relative_change": change}
    return TheoremReport.from_verdict("side_a_boundedness", ctx.scenario.name, statistics,
                                      {"stability": thresholds.stability},
                                      np.isfinite(fine) and change <= thresholds.stability)


def check_boundary_blowup(ctx: ScenarioContext, ray: Ray) -> TheoremReport:
    """
    沿 ∂D_j 的法向射线逼近边界时 I(x) 严格单调：阻抗递增，声软递减。
    近边界点使用加密求解器。
    """
    if ctx.scene.is_empty:
        raise PremiseNotRealized(0.0, ctx.scenario.thresholds.growth)
    points = ray.points(ctx.scene)
    if not np.all(ctx.scene.in_domain(points)):
        raise CheckError(f"射线 (component={ray.component}, t={ray.t}) 上有点不在 Ω∖D̄ 内。")
    values = np.array([indicator_direct(ctx.refined_solver, x).value for x in points])
    steps = np.diff(values)
    impedance = ctx.scene.boundary_condition == "impedance"
    monotone = bool(np.all(steps > 0)) if impedance else bool(np.all(steps < 0))
    statistics = {"I_far": float(values[0]), "I_near": float(values[-1]), "monotone": monotone,
                  "direction": "increasing" if impedance else "decreasing"}
    table = [{"distance": d, "I": float(value)} for d, value in zip(ray.distances, values)]
    subject = f"component_{ray.component}_t_{ray.t:g}"
    return TheoremReport.from_verdict("boundary_blowup", ctx.scenario.name, statistics, {}, monotone, subject,
                                      {"boundary_blowup": table})
