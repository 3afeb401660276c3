# -*- coding: utf-8 -*-

"""
网格重建：对网格上每个针尖 x 运行指示序列（Side A）或点分类（Side B），
输出原始值、状态、置信度，以及掩码的 marching squares 等值线。
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.errors import ProbeError
from core.solver import DtnSolver
from geometry.curves import distance_to_curve
from geometry.needle import validate_needle
from .classify import Classification, NeedlePolicy, ProbeOptions, classify_point, probe_series
from .divergence import DivergenceStatus, detect_divergence

MODES = ("side_a", "side_b")
STATUS_CONVERGED = "Converged"
STATUS_DIVERGED_POS = "Diverged+"
STATUS_DIVERGED_NEG = "Diverged-"
STATUS_REJECTED = "Rejected"
# A_min = A_MIN_FACTOR × 收敛点 |I| 的中位数
A_MIN_FACTOR = 10.0


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    h: float
    margin: float = 0.02

    def axes(self) -> Tuple[np.ndarray, np.ndarray]:
        nx = int(round((self.x_max - self.x_min) / self.h)) + 1
        ny = int(round((self.y_max - self.y_min) / self.h)) + 1
        return self.x_min + self.h * np.arange(nx), self.y_min + self.h * np.arange(ny)

    def points(self) -> np.ndarray:
        """行优先（y 外层、x 内层）的网格点。"""
        xs, ys = self.axes()
        gx, gy = np.meshgrid(xs, ys)
        return np.stack([gx.ravel(), gy.ravel()], axis=-1)


@dataclass
class PointResult:
    value: float
    status: str
    confidence: str
    needle: str
    series: Optional[List[float]] = None


@dataclass
class IndicatorField:
    grid: GridSpec
    mode: str
    points: np.ndarray
    values: np.ndarray
    statuses: List[str]
    confidence: List[str]
    needles: List[str]
    mask: np.ndarray
    contours: List[np.ndarray] = field(default_factory=list)
    thresholds: Dict[str, float] = field(default_factory=dict)

    @property
    def shape(self) -> Tuple[int, int]:
        xs, ys = self.grid.axes()
        return ys.size, xs.size

    def value_matrix(self) -> np.ndarray:
        """拒绝点为 NaN 的 (ny, nx) 值矩阵。"""
        values = np.where(np.array(self.statuses) == STATUS_REJECTED, np.nan, self.values)
        return values.reshape(self.shape)


# -----------------------------------------------------------------------------
# 1. 等值线提取（marching squares）
# -----------------------------------------------------------------------------

# 单元角点按 (0,0), (1,0), (1,1), (0,1) 逆时针编号，边 e 连接角点 e 与 e+1
_CELL_CORNERS = ((0, 0), (0, 1), (1, 1), (1, 0))


def _edge_point(p0, p1, v0, v1, level):
    t = (level - v0) / (v1 - v0)
    t = min(max(t, 0.0), 1.0)
    return p0 * (1.0 - t) + t * p1


def marching_squares(field_values: np.ndarray, xs: np.ndarray, ys: np.ndarray, level: float = 0.5) -> List[np.ndarray]:
    """
    提取 field_values（形状 (ny, nx)）在 level 处的等值线并串成折线。

    鞍点单元用四角平均值决定连接方式。NaN 视为低于 level。
    """
    values = np.nan_to_num(np.asarray(field_values, dtype=float), nan=level - 1.0)
    segments = []
    ny, nx = values.shape
    for j in range(ny - 1):
        for i in range(nx - 1):
            corners = [np.array([xs[i + di], ys[j + dj]]) for dj, di in _CELL_CORNERS]
            samples = [values[j + dj, i + di] for dj, di in _CELL_CORNERS]
            above = [s > level for s in samples]
            if all(above) or not any(above):
                continue
            crossings = []
            for e in range(4):
                a, b = e, (e + 1) % 4
                if above[a] != above[b]:
                    crossings.append((e, _edge_point(corners[a], corners[b], samples[a], samples[b], level)))
            if len(crossings) == 2:
                segments.append((crossings[0][1], crossings[1][1]))
                continue
            # 鞍点：四条边都有交点
            center_above = np.mean(samples) > level
            points = {e: p for e, p in crossings}
            if center_above == above[0]:
                pairs = ((0, 1), (2, 3))
            else:
                pairs = ((3, 0), (1, 2))
            for e0, e1 in pairs:
                segments.append((points[e0], points[e1]))
    return _chain_segments(segments)


def _key(point: np.ndarray) -> Tuple[float, float]:
    return round(float(point[0]), 10), round(float(point[1]), 10)


def _chain_segments(segments) -> List[np.ndarray]:
    """把共享端点的线段串成折线；闭合折线首尾点重复。"""
    adjacency: Dict[Tuple[float, float], List[int]] = {}
    for index, (p, q) in enumerate(segments):
        adjacency.setdefault(_key(p), []).append(index)
        adjacency.setdefault(_key(q), []).append(index)
    used = [False] * len(segments)
    polylines = []
    # 先从度为 1 的端点出发（开放折线），再处理剩下的闭合环
    starts = [key for key, items in sorted(adjacency.items()) if len(items) == 1]
    starts += sorted(adjacency)
    for start in starts:
        for first in adjacency[start]:
            if used[first]:
                continue
            path = [start]
            current = start
            index = first
            while index is not None:
                used[index] = True
                p, q = segments[index]
                nxt = _key(q) if _key(p) == current else _key(p)
                path.append(nxt)
                current = nxt
                index = next((i for i in adjacency[current] if not used[i]), None)
            polylines.append(np.array(path, dtype=float))
    return polylines


# -----------------------------------------------------------------------------
# 2. 网格扫描
# -----------------------------------------------------------------------------

def _status_from_divergence(status: DivergenceStatus) -> Tuple[str, str]:
    if status is DivergenceStatus.DIVERGING_POS:
        return STATUS_DIVERGED_POS, "high"
    if status is DivergenceStatus.DIVERGING_NEG:
        return STATUS_DIVERGED_NEG, "high"
    if status is DivergenceStatus.CONVERGED:
        return STATUS_CONVERGED, "high"
    return STATUS_CONVERGED, "low"


def _scan_point(solver: DtnSolver, x: np.ndarray, mode: str, policy: NeedlePolicy, options: ProbeOptions,
                margin: float) -> PointResult:
    scene = solver.scene
    if not scene.outer.contains(x[None, :])[0] or distance_to_curve(x[None, :], scene.outer)[0][0] < margin:
        return PointResult(float("nan"), STATUS_REJECTED, "high", "")
    try:
        if mode == "side_b":
            verdict = classify_point(solver, x, policy, options)
            if verdict.classification is Classification.IN_OBSTACLE_CLOSURE:
                status = _status_from_divergence(verdict.status)[0]
            else:
                status = STATUS_CONVERGED
            deciding = next((e["needle"] for e in verdict.evidence if e.get("status") == verdict.status.value), "")
            values = verdict.series.get(deciding).values if deciding in verdict.series else None
            return PointResult(verdict.value, status, verdict.confidence, deciding, values)
        chosen = None
        for needle_id, needle in policy.needles(scene.outer, x):
            check = validate_needle(needle, scene.outer, scene)
            if check.ok:
                chosen = (needle_id, needle)
                break
            logging.warning(f"网格点 ({x[0]:.4f}, {x[1]:.4f}) 的针 {needle_id} 被拒绝: {check.violation}")
        if chosen is None:
            return PointResult(float("nan"), STATUS_REJECTED, "high", "")
        needle_id, needle = chosen
        series = probe_series(solver, x, needle, options, needle_id)
        t = options.thresholds
        status, confidence = _status_from_divergence(detect_divergence(series.values, t.window, t.tau_rel, t.g_min))
        value = series.values[-1] if series.values else float("nan")
        return PointResult(value, status, confidence, needle_id, list(series.values))
    except ProbeError as e:
        logging.warning(f"网格点 ({x[0]:.4f}, {x[1]:.4f}) 被拒绝: {e}")
        return PointResult(float("nan"), STATUS_REJECTED, "high", "")


def _apply_amplitude_floor(results: List[PointResult], options: ProbeOptions) -> float:
    """第二遍：A_min = 10 × 收敛点 |I| 的中位数，幅值不够的发散点降为低置信度的 Converged。"""
    converged = [abs(r.value) for r in results if r.status == STATUS_CONVERGED and r.confidence == "high"
                 and np.isfinite(r.value)]
    a_min = A_MIN_FACTOR * float(np.median(converged)) if converged else options.thresholds.a_min
    a_min = max(a_min, options.thresholds.a_min)
    t = options.thresholds
    for r in results:
        if r.status in (STATUS_DIVERGED_POS, STATUS_DIVERGED_NEG) and r.series is not None:
            status = detect_divergence(r.series, t.window, t.tau_rel, t.g_min, a_min)
            r.status, r.confidence = _status_from_divergence(status)
    return a_min


def reconstruct_grid(solver: DtnSolver, grid: GridSpec, mode: str = "side_b", policy: Optional[NeedlePolicy] = None,
                     options: Optional[ProbeOptions] = None, threads: int = 1,
                     front_threshold: Optional[float] = None) -> IndicatorField:
    """
    在网格上扫描指示量。单点错误记为 Rejected，不中断扫描；结果与线程调度顺序无关。

    Args:
        mode (str): "side_a"（针避开障碍物时的 I(x) 及其爆破前沿）或 "side_b"（按发散分类）。
        threads (int): 线程数，共享只读的求解器。
        front_threshold (float): Side A 中 |I| 超过该值视为爆破前沿，默认取 A_min。
    """
    if mode not in MODES:
        raise ValueError(f"未知的重建模式 '{mode}'，可选: {MODES}")
    policy = policy or NeedlePolicy()
    options = options or ProbeOptions()
    points = grid.points()
    total = points.shape[0]
    logging.info(f"开始网格扫描（{mode}）：{total} 个点，{threads} 个线程。")

    progress_step = max(1, total // 10)

    def task(item):
        index, x = item
        result = _scan_point(solver, x, mode, policy, options, grid.margin)
        if (index + 1) % progress_step == 0:
            logging.info(f"网格扫描进度约 {100 * (index + 1) // total}%。")
        return result

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        results = list(executor.map(task, enumerate(points)))

    a_min = _apply_amplitude_floor(results, options)
    values = np.array([r.value for r in results], dtype=float)
    statuses = [r.status for r in results]
    if mode == "side_b":
        mask = np.array([s in (STATUS_DIVERGED_POS, STATUS_DIVERGED_NEG) for s in statuses])
    else:
        threshold = a_min if front_threshold is None else front_threshold
        mask = np.array([s in (STATUS_DIVERGED_POS, STATUS_DIVERGED_NEG) or
                         (s == STATUS_CONVERGED and np.isfinite(v) and threshold > 0 and abs(v) >= threshold)
                         for s, v in zip(statuses, values)])
    xs, ys = grid.axes()
    contours = marching_squares(mask.reshape(ys.size, xs.size).astype(float), xs, ys)
    field_result = IndicatorField(
        grid=grid, mode=mode, points=points, values=values, statuses=statuses,
        confidence=[r.confidence for r in results], needles=[r.needle for r in results],
        mask=mask, contours=contours,
        thresholds={"window": options.thresholds.window, "tau_rel": options.thresholds.tau_rel,
                    "g_min": options.thresholds.g_min, "a_min": a_min},
    )
    counts = {s: statuses.count(s) for s in sorted(set(statuses))}
    logging.info(f"网格扫描完成：状态统计 {counts}，提取到 {len(contours)} 条等值线。")
    return field_result
