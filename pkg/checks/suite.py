# -*- coding: utf-8 -*-

"""
校验套件：对每个场景执行所有适用的校验，单项失败只记录状态，套件本身不中断。
"""

import functools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Sequence, Tuple

from core.errors import PremiseNotRealized
from .blowup import check_ball_blowup, check_cone_blowup, check_obstacle_energy_blowup, check_ratio_decay_probe
from .context import ScenarioContext
from .energy_identity import check_energy_identity_refined
from .lower_bound import check_lower_bound_fit
from .nullity import check_obstacle_free_nullity
from .report import STATUS_ERROR, STATUS_PREMISE, Scenario, TheoremReport
from .side_a import check_boundary_blowup, check_side_a_boundedness, check_side_a_convergence
from .side_b import check_divergence, divergence_check_id

# 每个条目: (subject, 无参可调用对象)
CheckItem = Tuple[str, Callable[[], TheoremReport]]


def _no_obstacle(ctx: ScenarioContext):
    raise PremiseNotRealized(0.0, ctx.scenario.thresholds.growth)


def _crossing(check) -> Callable[[ScenarioContext], List[CheckItem]]:
    """针与障碍物相交的探测点；无障碍物时产生一个前提未实现的条目。"""
    def items(ctx: ScenarioContext) -> List[CheckItem]:
        if ctx.scene.is_empty:
            return [("", functools.partial(_no_obstacle, ctx))]
        return [(p.name, functools.partial(check, ctx, p)) for p in ctx.crossing_probes()]
    return items


def _all_probes(check) -> Callable[[ScenarioContext], List[CheckItem]]:
    def items(ctx: ScenarioContext) -> List[CheckItem]:
        return [(p.name, functools.partial(check, ctx, p)) for p in ctx.scenario.probes]
    return items


def _side_a_items(ctx: ScenarioContext) -> List[CheckItem]:
    if ctx.scene.is_empty:
        return []
    separation = ctx.scenario.thresholds.separation
    return [(p.name, functools.partial(check_side_a_convergence, ctx, p)) for p in ctx.avoiding_probes()
            if ctx.distance_to_obstacles(p) >= separation]


def _boundedness_items(ctx: ScenarioContext) -> List[CheckItem]:
    if ctx.scene.is_empty or ctx.scenario.boundedness_grid is None:
        return []
    return [("", functools.partial(check_side_a_boundedness, ctx))]


def _ray_items(ctx: ScenarioContext) -> List[CheckItem]:
    if ctx.scene.is_empty:
        return [("", functools.partial(_no_obstacle, ctx))]
    return [(f"component_{r.component}_t_{r.t:g}", functools.partial(check_boundary_blowup, ctx, r))
            for r in ctx.scenario.rays]


def _identity_items(ctx: ScenarioContext) -> List[CheckItem]:
    if ctx.scene.is_empty or ctx.scene.boundary_condition == "sound_soft":
        return [("", functools.partial(check_energy_identity_refined, ctx))]
    return []


def _nullity_items(ctx: ScenarioContext) -> List[CheckItem]:
    return [("", functools.partial(check_obstacle_free_nullity, ctx))] if ctx.scene.is_empty else []


def _divergence_items(ctx: ScenarioContext) -> List[CheckItem]:
    return _crossing(check_divergence)(ctx)


# --- 校验映射表 ---
# key: 校验 id（报告中的 check_id）
# value: 给定场景上下文，返回该校验的全部条目
CHECK_MAP: Dict[str, Callable[[ScenarioContext], List[CheckItem]]] = {
    "ratio_decay": _crossing(check_ratio_decay_probe),
    "cone_blowup": _all_probes(check_cone_blowup),
    "ball_blowup": _all_probes(check_ball_blowup),
    "obstacle_energy_blowup": _crossing(check_obstacle_energy_blowup),
    "side_a_convergence": _side_a_items,
    "side_a_boundedness": _boundedness_items,
    "boundary_blowup": _ray_items,
    "divergence": _divergence_items,
    "energy_identity": _identity_items,
    "lower_bound_fit": _crossing(check_lower_bound_fit),
    "obstacle_free_nullity": _nullity_items,
}


def _resolve_check_id(check_id: str, ctx: ScenarioContext) -> str:
    if check_id == "divergence":
        return divergence_check_id(ctx.scene.boundary_condition)
    return check_id


def _run_item(check_id: str, ctx: ScenarioContext, subject: str, call: Callable[[], TheoremReport]) -> TheoremReport:
    scenario = ctx.scenario.name
    try:
        report = call()
    except PremiseNotRealized as e:
        logging.warning(f"场景 {scenario} 的校验 {check_id} ({subject or '-'}) 前提未实现: {e}")
        return TheoremReport(check_id, scenario, {"growth": e.growth}, {"growth": e.required}, False,
                             STATUS_PREMISE, subject, str(e))
    except Exception as e:
        logging.error(f"场景 {scenario} 的校验 {check_id} ({subject or '-'}) 执行出错: {e}", exc_info=True)
        return TheoremReport(check_id, scenario, {}, ctx.scenario.thresholds.as_dict(), False, STATUS_ERROR,
                             subject, str(e))
    logging.info(f"场景 {scenario} 的校验 {report.check_id} ({subject or '-'}): {report.status}")
    return report


def run_scenario(scenario: Scenario, checks: Sequence[str] = None) -> List[TheoremReport]:
    """顺序执行一个场景上所有适用的校验；checks 为空时执行 CHECK_MAP 中的全部校验。"""
    ctx = ScenarioContext(scenario)
    reports = []
    for check_id in checks or list(CHECK_MAP):
        factory = CHECK_MAP.get(check_id)
        if factory is None:
            logging.warning(f"请求的校验 '{check_id}' 没有找到对应的实现，已跳过。")
            continue
        resolved = _resolve_check_id(check_id, ctx)
        try:
            items = factory(ctx)
        except Exception as e:
            logging.error(f"场景 {scenario.name} 的校验 {resolved} 无法展开: {e}", exc_info=True)
            reports.append(TheoremReport(resolved, scenario.name, {}, scenario.thresholds.as_dict(), False,
                                         STATUS_ERROR, "", str(e)))
            continue
        for subject, call in items:
            reports.append(_run_item(resolved, ctx, subject, call))
    return reports


def run_suite(scenarios: Sequence[Scenario], threads: int = 1, checks: Sequence[str] = None) -> List[TheoremReport]:
    """
    并行执行各场景（每个场景独占自己的求解器），结果按场景名排序合并。

    Returns:
        List[TheoremReport]: 全部校验报告；单项失败记录为 FAIL / ERROR / PREMISE_NOT_REALIZED。
    """
    ordered = sorted(scenarios, key=lambda s: s.name)
    logging.info(f"开始执行校验套件：{len(ordered)} 个场景，{threads} 个线程。")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        per_scenario = list(executor.map(lambda s: run_scenario(s, checks), ordered))
    reports = [report for group in per_scenario for report in group]
    summary: Dict[str, int] = {}
    for report in reports:
        summary[report.status] = summary.get(report.status, 0) + 1
    logging.info(f"校验套件完成：共 {len(reports)} 项，状态统计 {dict(sorted(summary.items()))}。")
    return reports
