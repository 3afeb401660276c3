# -*- coding: utf-8 -*-

"""
针序列的爆破类校验：D 上的比值衰减、针尖锥形区域与针上小球内的梯度能量增长、与障碍物相交时 D 上的梯度能量增长。
"""

from typing import Optional, Sequence

import numpy as np

from core.errors import PremiseNotRealized
from geometry.area import DiskRegion, SectorRegion, StarRegion
from geometry.scene import ObstacleScene, classify_needle_vs_obstacle
from needles.entire import needle_norms
from needles.fitting import NeedleSequence
from .context import CROSSING_RELATIONS, ScenarioContext
from .report import CheckThresholds, Probe, TheoremReport

BALL_RADIUS = 0.1
CONE_RADIUS = 0.15
CONE_HALF_ANGLE = np.pi / 8


def _last_half(values: np.ndarray) -> np.ndarray:
    return values[len(values) // 2:]


def check_ratio_decay_series(h1: Sequence[float], l2: Sequence[float], thresholds: Optional[CheckThresholds] = None,
                             scenario: str = "synthetic", subject: str = "") -> TheoremReport:
    """
    比值衰减判据：‖∇v_n‖_{L²(D)} 增长 >= growth 倍；‖v_n‖/‖∇v_n‖ 在 n_max 处 <= decay × 增长起点处的值，
    且在后半段严格递减。增长起点为第一个 h1[n+1] > h1[n] 的 n。

    Raises:
        PremiseNotRealized: 梯度增长不足 growth 倍（调度太短）。
    """
    thresholds = thresholds or CheckThresholds()
    h1 = np.asarray(h1, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    growth = float(h1[-1] / h1[0]) if h1[0] > 0 else float("inf")
    if not growth >= thresholds.growth:
        raise PremiseNotRealized(growth, thresholds.growth)
    ratio = l2 / h1
    rising = np.nonzero(np.diff(h1) > 0)[0]
    onset = int(rising[0]) if rising.size else 0
    decay = float(ratio[-1] / ratio[onset])
    tail_decreasing = bool(np.all(np.diff(_last_half(ratio)) < 0))
    statistics = {"growth": growth, "onset": onset, "ratio_onset": float(ratio[onset]),
                  "ratio_final": float(ratio[-1]), "decay": decay, "tail_decreasing": tail_decreasing}
    passed = decay <= thresholds.decay and tail_decreasing
    table = [{"n": n, "h1": float(a), "l2": float(b), "ratio": float(c)} for n, (a, b, c) in enumerate(zip(h1, l2, ratio))]
    return TheoremReport.from_verdict("ratio_decay", scenario, statistics,
                                      {"growth": thresholds.growth, "decay": thresholds.decay}, passed, subject,
                                      {"ratio_decay": table})


def check_ratio_decay(seq: NeedleSequence, scene: ObstacleScene, thresholds: Optional[CheckThresholds] = None,
                      scenario: str = "", order: int = 48) -> TheoremReport:
    """
    在 D（全部分量之并）上计算每个针元素的范数后做比值衰减判据。

    Raises:
        PremiseNotRealized: 场景无障碍物、针不与障碍物相交，或梯度增长不足。
    """
    thresholds = thresholds or CheckThresholds()
    if scene.is_empty or classify_needle_vs_obstacle(seq.x, seq.needle, scene) not in CROSSING_RELATIONS:
        raise PremiseNotRealized(0.0, thresholds.growth)
    regions = [StarRegion(c.boundary) for c in scene.components]
    norms = np.array([needle_norms(v, regions, order) for v in seq.elements])
    return check_ratio_decay_series(norms[:, 1], norms[:, 0], thresholds, scenario)


def growth_report(check_id: str, scenario: str, subject: str, h1: np.ndarray, thresholds: CheckThresholds,
                  extra=None, monotone_tail: bool = True) -> TheoremReport:
    """增长判据：n_max 处的值 >= growth × n=0 处的值；monotone_tail 时还要求后半段不减。"""
    growth = float(h1[-1] / h1[0]) if h1[0] > 0 else float("inf")
    tail_nondecreasing = bool(np.all(np.diff(_last_half(h1)) >= 0))
    statistics = {"growth": growth, "tail_nondecreasing": tail_nondecreasing, "initial": float(h1[0]),
                  "final": float(h1[-1])}
    statistics.update(extra or {})
    table = [{"n": n, "h1": float(value)} for n, value in enumerate(h1)]
    return TheoremReport.from_verdict(check_id, scenario, statistics, {"growth": thresholds.growth},
                                      growth >= thresholds.growth and (tail_nondecreasing or not monotone_tail), subject, {check_id: table})


def _gradient_norms(seq: NeedleSequence, region, order: int = 48) -> np.ndarray:
    return np.array([needle_norms(v, region, order)[1] for v in seq.elements])


def _require_obstacles(ctx: ScenarioContext):
    """爆破类校验以障碍物存在为前提；无障碍物场景一律记为前提未实现。"""
    if ctx.scene.is_empty:
        raise PremiseNotRealized(0.0, ctx.scenario.thresholds.growth)


def check_cone_blowup(ctx: ScenarioContext, probe: Probe) -> TheoremReport:
    """
    针尖 x 处、沿针尖方向的有限锥（张角 π/4，半径 0.15）内 ‖∇v_n‖ 的增长。

    Raises:
        PremiseNotRealized: 场景无障碍物。
    """
    _require_obstacles(ctx)
    seq = ctx.sequence(probe)
    needle = ctx.needle(probe)
    cone = SectorRegion(vertex=tuple(probe.tip), radius=CONE_RADIUS, direction=tuple(needle.tip_direction),
                        half_angle=CONE_HALF_ANGLE, clip=ctx.scene.outer)
    return growth_report("cone_blowup", ctx.scenario.name, probe.name, _gradient_norms(seq, cone),
                         ctx.scenario.thresholds)


def check_ball_blowup(ctx: ScenarioContext, probe: Probe) -> TheoremReport:
    """
    针上内点（针的弧长中点）处半径 0.1 的球内 ‖∇v_n‖ 的增长。

    同一点处锥形区域的增长只作为诊断量附带在统计里，不参与判定。

    Raises:
        PremiseNotRealized: 场景无障碍物。
    """
    _require_obstacles(ctx)
    seq = ctx.sequence(probe)
    needle = ctx.needle(probe)
    points = needle.sample(needle.length / 64.0)
    arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(points, axis=0), axis=1))])
    middle = points[int(np.searchsorted(arc, 0.5 * arc[-1]))]
    ball = DiskRegion(center=tuple(middle), radius=BALL_RADIUS, clip=ctx.scene.outer)
    cone = SectorRegion(vertex=tuple(middle), radius=CONE_RADIUS, direction=tuple(needle.tip_direction),
                        half_angle=CONE_HALF_ANGLE, clip=ctx.scene.outer)
    cone_h1 = _gradient_norms(seq, cone)
    extra = {"interior_cone_growth": float(cone_h1[-1] / cone_h1[0]) if cone_h1[0] > 0 else float("inf")}
    return growth_report("ball_blowup", ctx.scenario.name, probe.name, _gradient_norms(seq, ball),
                         ctx.scenario.thresholds, extra)


def check_obstacle_energy_blowup(ctx: ScenarioContext, probe: Probe) -> TheoremReport:
    """针尖在 D̄ 内或针穿过 D 时，‖∇v_n‖_{L²(D)} 的增长。"""
    thresholds = ctx.scenario.thresholds
    _require_obstacles(ctx)
    series = ctx.series(probe)
    h1 = np.sqrt(np.asarray(series.grad_energy_D))
    return growth_report("obstacle_energy_blowup", ctx.scenario.name, probe.name, h1, thresholds,
                         {"relation": ctx.relation(probe).value}, monotone_tail=False)


def check_ratio_decay_probe(ctx: ScenarioContext, probe: Probe) -> TheoremReport:
    thresholds = ctx.scenario.thresholds
    _require_obstacles(ctx)
    series = ctx.series(probe)
    report = check_ratio_decay_series(np.sqrt(np.asarray(series.grad_energy_D)), series.l2_D, thresholds,
                                      ctx.scenario.name, probe.name)
    # 多分量场景附带每个分量各自的比值
    for j, ratios in sorted(series.component_ratio.items()):
        report.statistics[f"ratio_final_D_{j}"] = float(ratios[-1])
    return report
