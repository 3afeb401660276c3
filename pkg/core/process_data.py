# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from geometry.area import DiskRegion
from geometry.needle import NeedleSpec, require_valid_needle, snap_needle_to_boundary, straight_needle
from geometry.scene import ObstacleScene
from indicator.classify import NeedlePolicy, ProbeOptions
from indicator.divergence import DivergenceThresholds
from indicator.reconstruct import GridSpec
from needles.schedule import ScheduleStep, default_schedule
from .load_data import RunConfig


# -----------------------------------------------------------------------------
# 1. 定义预处理后的数据容器
#    所有下游阶段（求解、针序列、指示量、网格扫描）都只读这个容器。
# -----------------------------------------------------------------------------

@dataclass
class ProbeInputData:
    """
    经过校验、可直接用于计算的输入。
    """
    config: RunConfig
    scene: ObstacleScene
    schedule: List[ScheduleStep]
    options: ProbeOptions
    policy: NeedlePolicy
    grid: GridSpec

    # 探测点：针尖、针与登记的紧集
    tip: np.ndarray = None
    needle: Optional[NeedleSpec] = None
    compact_sets: Dict[str, DiskRegion] = field(default_factory=dict)


# -----------------------------------------------------------------------------
# 2. 辅助函数
# -----------------------------------------------------------------------------

def _probe_needle(config: RunConfig, scene: ObstacleScene) -> NeedleSpec:
    probe = config.probe
    if probe.needle is None:
        return straight_needle(scene.outer, probe.tip)
    # 配置里的起点只要求在容差内落在 ∂Ω 上，这里吸附到曲线上
    return snap_needle_to_boundary(NeedleSpec(probe.needle), scene.outer)


def _detours(config: RunConfig, scene: ObstacleScene) -> Tuple[NeedleSpec, ...]:
    return tuple(snap_needle_to_boundary(NeedleSpec(d), scene.outer) for d in config.probe.detours)


# -----------------------------------------------------------------------------
# 3. 主函数
# -----------------------------------------------------------------------------

def process_data(config: RunConfig) -> ProbeInputData:
    """
    校验场景并把配置节转换为计算用的对象（调度、判定阈值、针策略、网格）。

    Raises:
        GeometryError: 场景或针不合法。
        ConfigError: 调度参数不合法。
    """
    logging.info("开始预处理输入...")
    scene = config.scene
    scene.validate()

    s = config.needle_schedule
    schedule = default_schedule(s.n_max, s.eps0, s.q, s.M0, s.M_step, s.alpha0, s.alpha_ratio)
    logging.info(f"针调度：{len(schedule)} 步，ε 从 {schedule[0].eps:.4f} 到 {schedule[-1].eps:.4f}，"
                 f"M 从 {schedule[0].M} 到 {schedule[-1].M}。")

    ind = config.indicator
    options = ProbeOptions(
        schedule=schedule,
        center=config.fitting.center,
        spacing=config.fitting.spacing,
        thresholds=DivergenceThresholds(ind.window, ind.tau_rel, ind.g_min, ind.a_min),
        formulation=ind.formulation,
    )
    g = config.grid
    data = ProbeInputData(
        config=config, scene=scene, schedule=schedule, options=options,
        policy=NeedlePolicy(detours=_detours(config, scene)),
        grid=GridSpec(g.x_min, g.x_max, g.y_min, g.y_max, g.h, g.margin),
        tip=np.asarray(config.probe.tip, dtype=float),
        compact_sets={c.name: DiskRegion(center=c.center, radius=c.radius) for c in config.probe.compact_sets},
    )
    if config.run_config.mode in ("needle-fit", "indicator-series"):
        data.needle = _probe_needle(config, scene)
        # 擦边针属于输入错误，在求解前拒绝
        require_valid_needle(data.needle, scene.outer, scene)
        logging.info(f"探测针：{len(data.needle.vertices)} 个顶点，长度 {data.needle.length:.4f}。")
    logging.info("输入预处理完成。")
    return data
